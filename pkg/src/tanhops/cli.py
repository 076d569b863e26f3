"""Command-line harness: density-check, eval, converge, voronovskaya.

Exit codes: 0 success, 1 usage/config error, 2 numerical-check failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activation import ActivationParams, lattice_tail_mass, phi, phi_integral, window_radius
from .convergence import SweepPlan, fit_sweep, run_sweep, voronovskaya_sweep
from .operators import OperatorConfig, evaluate, evaluate_derivative
from .testbed import GridSpec, NormKind, get_function

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class ConfigError(ValueError):
    pass


def _floats(text):
    return tuple(float(t) for t in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(t) for t in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    operator: str = "basic"
    q: float = 1.0
    lam: float = 1.0
    n: tuple = (8, 16, 32, 64, 128, 256)
    dimension: int = 1
    function: str = "gaussian"
    norm: str = "sup"
    grid_lower: tuple = (-1.0,)
    grid_upper: tuple = (1.0,)
    grid_points: int = 101
    theta: int = 3
    weights: tuple | None = None
    cell_quad_order: int = 5
    truncation_tol: float = 1e-12
    output_dir: str = "."
    point: tuple = (0.3,)
    m: int = 2
    derivatives: bool = False
    seed: int = 0
    workers: int = 1
    # density-check
    symmetry_tol: float = 1e-14
    normalization_tol: float = 1e-8
    partition_tol: float = 1e-10
    partition_truncation_tol: float = 1e-13
    check_samples: int = 1000

    _PARSERS = {
        "operator": str, "q": float, "lambda": float, "n": _ints, "dimension": int,
        "function": str, "norm": str, "grid_lower": _floats, "grid_upper": _floats,
        "grid_points": int, "theta": int, "weights": _floats, "cell_quad_order": int,
        "truncation_tol": float, "output_dir": str, "point": _floats, "m": int,
        "derivatives": _bool, "seed": int, "workers": int, "symmetry_tol": float,
        "normalization_tol": float, "partition_tol": float, "partition_truncation_tol": float,
        "check_samples": int,
    }

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """Parse flat ``key = value`` lines; ``#`` starts a comment."""
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in cls._PARSERS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                values["lam" if key == "lambda" else key] = cls._PARSERS[key](value)
            except ValueError as e:
                raise ConfigError(f"line {lineno}: bad value for {key}: {e}") from None
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        return cls.from_text(text)

    def _broadcast(self, v, what):
        v = tuple(v)
        if len(v) == 1:
            return v * self.dimension
        if len(v) != self.dimension:
            raise ConfigError(f"{what} has {len(v)} entries, dimension is {self.dimension}")
        return v

    def activation(self) -> ActivationParams:
        try:
            return ActivationParams(self.q, self.lam)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid activation parameters: {e}") from None

    def operator_config(self, n=None) -> OperatorConfig:
        try:
            return OperatorConfig(
                kind=self.operator, n=self.n[0] if n is None else n, dimension=self.dimension,
                activation=self.activation(), truncation_tol=self.truncation_tol,
                theta=self.theta, weights=self.weights, cell_quad_order=self.cell_quad_order,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def target(self):
        try:
            return get_function(self.function, self.dimension)
        except (KeyError, ValueError) as e:
            raise ConfigError(str(e.args[0])) from None

    def grid(self) -> GridSpec:
        try:
            return GridSpec(self._broadcast(self.grid_lower, "grid_lower"),
                            self._broadcast(self.grid_upper, "grid_upper"), self.grid_points)
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def sweep_plan(self) -> SweepPlan:
        try:
            norm = NormKind.parse(self.norm)
            return SweepPlan(self.operator_config(), self.target(), self.grid(), norm, self.n, self.seed)
        except ValueError as e:
            raise ConfigError(str(e)) from None


def fmt(v) -> str:
    return format(float(v), ".17g")


def _writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def cmd_density_check(cfg: ExperimentConfig, out: Path) -> int:
    p = cfg.activation()
    W = window_radius(p, cfg.partition_truncation_tol)
    # symmetry over the support scale that matters to the operators
    xs = np.linspace(-(W + 1), W + 1, cfg.check_samples)
    sym = float(np.max(np.abs(phi(p, xs) - phi(p, -xs))))
    norm_err = abs(phi_integral(p) - 1.0)
    x0 = np.linspace(0.0, 1.0, 101)[:-1]
    k = np.arange(-W, W + 1)
    pou = float(np.max(np.abs(phi(p, x0[:, None] - k[None, :]).sum(axis=1) - 1.0)))
    checks = [
        ("symmetry_max_dev", sym, cfg.symmetry_tol),
        ("normalization_abs_err", norm_err, cfg.normalization_tol),
        ("partition_of_unity_max_dev", pou, cfg.partition_tol),
    ]
    lines = [f"q={fmt(p.q)} lambda={fmt(p.lam)} window_radius={W} "
             f"tail_bound={fmt(lattice_tail_mass(p, W))}"]
    ok = True
    for name, value, tol in checks:
        passed = value < tol
        ok &= passed
        lines.append(f"{name}={fmt(value)} tol={fmt(tol)} {'PASS' if passed else 'FAIL'}")
    report = "\n".join(lines) + "\n"
    (out / "density_check.txt").write_text(report, encoding="utf-8")
    sys.stdout.write(report)
    return EXIT_OK if ok else EXIT_NUMERIC


def read_points(path, dimension: int) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read points: {e}") from None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals = [float(t) for t in line.split(",")]
        except ValueError:
            raise ConfigError(f"points line {lineno}: not a comma-separated list of reals") from None
        if len(vals) != dimension:
            raise ConfigError(f"points line {lineno}: {len(vals)} coordinates, dimension is {dimension}")
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"points line {lineno}: non-finite coordinate")
        rows.append(vals)
    return np.array(rows, dtype=float).reshape(-1, dimension)


def cmd_eval(cfg: ExperimentConfig, points_path, out: Path) -> int:
    if len(cfg.n) != 1:
        raise ConfigError("eval needs a single scale: set n to one integer")
    config = cfg.operator_config()
    f = cfg.target()
    X = read_points(points_path, cfg.dimension)
    N = cfg.dimension
    header = [f"x{i + 1}" for i in range(N)] + ["value"]
    cols = []
    if len(X):
        with np.errstate(all="ignore"):
            cols.append(evaluate(config, f, X))
            if cfg.derivatives:
                cols += [evaluate_derivative(config, f, X, i) for i in range(N)]
    if cfg.derivatives:
        header += [f"d_x{i + 1}" for i in range(N)]
    bad = []
    fh, w = _writer(out / "eval.csv")
    with fh:
        w.writerow(header)
        for r in range(len(X)):
            vals = [c[r] for c in cols]
            if not all(math.isfinite(v) for v in vals):
                bad.append(r + 1)
            w.writerow([fmt(v) for v in X[r]] + [fmt(v) for v in vals])
    if bad:
        print(f"non-finite operator values at point rows {bad}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


_GNUPLOT = """\
# gnuplot script; run: gnuplot -p {script}
set datafile separator ','
set logscale xy
set xlabel 'n'
set ylabel 'error ({norm})'
set key top right
slope = {slope}
C = {C}
plot '{csv}' using 1:2 skip 1 with linespoints pt 7 title '{op} on {fn}', \\
     C * x**slope with lines dt 2 title sprintf('fit n^{{%.3f}}', slope)
"""


def cmd_converge(cfg: ExperimentConfig, out: Path) -> int:
    plan = cfg.sweep_plan()
    records = run_sweep(plan, workers=cfg.workers)
    fit = fit_sweep(plan, records)
    fh, w = _writer(out / "converge.csv")
    with fh:
        w.writerow(["n", "error", "norm_kind"])
        for r in records:
            w.writerow([r.n, fmt(r.value), r.norm_kind])
    slope = fit.slope if fit.ok else 0.0
    C = fit.constant if fit.ok else 1.0
    (out / "converge.gp").write_text(
        _GNUPLOT.format(script="converge.gp", csv="converge.csv", norm=str(plan.norm),
                        slope=fmt(slope), C=fmt(C), op=cfg.operator, fn=cfg.function),
        encoding="utf-8")
    if not fit.ok:
        summary = f"saturated: {fit.used} of {len(records)} errors above noise floor {fmt(plan.saturation_floor)}"
        code = EXIT_NUMERIC
    else:
        summary = f"slope={fit.slope:.6f} r2={fit.r_squared:.6f}"
        if fit.saturated:
            summary += f" (excluded {len(records) - fit.used} saturated)"
        code = EXIT_OK
    (out / "summary.txt").write_text(summary + "\n", encoding="utf-8")
    print(summary)
    return code


def cmd_voronovskaya(cfg: ExperimentConfig, out: Path) -> int:
    if cfg.operator != "basic":
        raise ConfigError("voronovskaya requires operator = basic")
    f = cfg.target()
    if not (1 <= cfg.m <= min(f.m_max, 6)):
        raise ConfigError(f"m={cfg.m} outside 1..{min(f.m_max, 6)} for function {f.name}")
    x = cfg._broadcast(cfg.point, "point")
    if len(cfg.n) < 3:
        raise ConfigError("voronovskaya needs at least 3 scales")
    rows, err_fit, res_fit = voronovskaya_sweep(cfg.operator_config(), f, x, cfg.m, cfg.n)
    fh, w = _writer(out / "voronovskaya.csv")
    with fh:
        w.writerow(["n", "error", "residual"])
        for r in rows:
            w.writerow([r.n, fmt(r.error), fmt(abs(r.residual))])

    def show(fit):
        return f"{fit.slope:.6f}" if fit.ok else "saturated"

    summary = f"error_slope={show(err_fit)} residual_slope={show(res_fit)}"
    (out / "summary.txt").write_text(summary + "\n", encoding="utf-8")
    print(summary)
    # a remainder at the noise floor is the expected outcome for polynomials
    return EXIT_OK if err_fit.ok else EXIT_NUMERIC


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tanhops", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("density-check", "eval", "converge", "voronovskaya"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value config file (defaults apply when omitted)")
        sp.add_argument("--out", help="output directory (overrides output_dir)")
        sp.add_argument("--seed", type=int, help="seed for Hölder pair subsampling")
        if name == "eval":
            sp.add_argument("--points", required=True, help="one point per line, comma-separated")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        out = Path(args.out or cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "density-check":
            return cmd_density_check(cfg, out)
        if args.command == "eval":
            return cmd_eval(cfg, args.points, out)
        if args.command == "converge":
            return cmd_converge(cfg, out)
        return cmd_voronovskaya(cfg, out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

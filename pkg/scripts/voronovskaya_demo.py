#!/usr/bin/env python3
"""Raw error versus remainder after the moment expansion, Gaussian target, 1-D.

usage: python3 scripts/voronovskaya_demo.py [x] [m]
"""

import sys

from tanhops import OperatorConfig
from tanhops.convergence import DEFAULT_N, voronovskaya_sweep
from tanhops.testbed import get_function

x = float(sys.argv[1]) if len(sys.argv) > 1 else 0.3
m = int(sys.argv[2]) if len(sys.argv) > 2 else 2

rows, err_fit, res_fit = voronovskaya_sweep(OperatorConfig(), get_function("gaussian", 1), [x], m, DEFAULT_N)
print(f"x={x} m={m}")
print(f"{'n':>5} {'|A_n f - f|':>14} {'|remainder|':>14} {'ratio':>8}")
for r in rows:
    print(f"{r.n:5d} {r.error:14.6e} {abs(r.residual):14.6e} {abs(r.residual) / r.error:8.4f}")
print(f"error slope {err_fit.slope:.3f}, remainder slope {res_fit.slope:.3f}")

"""Neural-network operators driven by a symmetrized, perturbed tanh density.

Sampling (A_n), Kantorovich (K_n) and quadrature (Q_n) operators on R^N, with
tools to measure how fast they converge on functions of known smoothness.
"""

from .activation import ActivationParams, bump_M, g, g_prime, phi, phi_prime, window_radius
from .convergence import (RateFit, SweepPlan, fit_rate, moment, run_sweep, voronovskaya_residual,
                          voronovskaya_sweep)
from .density import LatticeWindow, build_window, weight_sum, z_density
from .operators import (OperatorConfig, apply_basic, apply_derivative, apply_kantorovich,
                        apply_quadrature, evaluate, evaluate_derivative)
from .testbed import (ErrorRecord, GridSpec, NormKind, TestFunction, builtin_functions, get_function,
                      holder_error, sobolev_error, sup_error)

__version__ = "0.1.0"

#!/usr/bin/env python3
"""Tabulate phi, its mode, window radius and normalization over a (q, lambda) grid."""

import numpy as np

from tanhops import ActivationParams
from tanhops.activation import phi, phi_integral, window_radius

QS = (0.2, 0.5, 1.0, 2.0, 5.0)
LAMS = (0.2, 0.5, 1.0, 2.0, 4.0)

print(f"{'q':>5} {'lambda':>7} {'phi(0)':>10} {'mode':>7} {'W(1e-12)':>9} {'|int-1|':>10}")
for q in QS:
    for lam in LAMS:
        p = ActivationParams(q, lam)
        x = np.linspace(0, 10 + 5 / lam, 4001)
        v = phi(p, x)
        # a mode away from 0 means the two bumps have separated
        mode = x[np.argmax(v)]
        print(f"{q:5g} {lam:7g} {v[0]:10.6f} {mode:7.3f} {window_radius(p, 1e-12):9d} "
              f"{abs(phi_integral(p) - 1):10.2e}")

"""
Segal-Bargmann transforms from the inverted oscillator
=======================================================

The free-particle complexifier ``p^2/2`` generates the Segal-Bargmann family
with coordinate ``x + i t_tilde p``. Running the inverted oscillator for time
``t`` with ``tan(alpha t) = alpha t_tilde`` gives the same sections once the
half-forms are matched; the two frames differ by ``cos(alpha t)``.
"""
import math

import numpy as np

from kshflow import ksh_transform, segal_bargmann, time_reparametrization

p, x = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9), indexing="ij")
Y = (1.0, -1.0)

for alpha in (1.0, 2.0):
    for frac in (0.25, 0.5, 0.75):
        t = frac * math.pi / (2 * alpha)
        tt = time_reparametrization(alpha, t)
        S = segal_bargmann(tt, Y)
        U = ksh_transform(alpha, t, Y)
        dev = np.max(np.abs(S(p, x) - U.in_frame(S.frame)(p, x)))
        ratio = np.mean(S(p, x) / U(p, x))
        print(f"alpha={alpha} t={t:.4f} t~={tt:.4f}  deviation {dev:.1e}  "
              f"S/U = {ratio.real:.12f}  sqrt(cos) = {math.sqrt(math.cos(alpha * t)):.12f}")

"""
Polarizations along the imaginary-time flow
============================================

Start from the vertical (Schrodinger) polarization and flow it for
imaginary time ``tau = i t`` with ``H = (p^2 - x^2)/2``. The holomorphic
coordinate ``w = a x + b p`` rotates, and the sign of
``Im(conj(a) b)`` tells us which kind of polarization we reached.
"""
import math

import numpy as np

from kshflow import PiTime, QuadraticHamiltonian, classify_polarization, holomorphic_coordinate, kahler_density

H = QuadraticHamiltonian.canonical(1.0)

# %%
# A coarse sweep over one half-period. The density is positive on
# ``(0, pi/2)``, vanishes at the momentum polarization and is negative on
# ``(pi/2, pi)``.
for t in np.linspace(0.0, math.pi, 9):
    w = holomorphic_coordinate(H, float(t))
    print(f"t={t:5.3f}  {str(classify_polarization(H, float(t))):14s}  "
          f"density={kahler_density(H, float(t)):+.3f}  w = ({complex(w.a):.3f}) x + ({complex(w.b):.3f}) p")

# %%
# Boundary times are exact when given as rational multiples of ``pi/alpha``.
for k in range(5):
    print(f"alpha t = {k}pi/2 -> {classify_polarization(H, PiTime(k, 2))}")

# %%
# With a cross term the real polarization at the quarter period is spanned
# by ``X_{h12 x + h11 p}``.
H2 = QuadraticHamiltonian(2.0, 1.0, -1.0)
print(classify_polarization(H2, PiTime(1, 2)), holomorphic_coordinate(H2, PiTime(1, 2)))

# %%
# A negative ``h11`` reverses the picture: Kahler times are now negative.
H3 = QuadraticHamiltonian(-3.0, 0.5, 1.0)
for t in (-0.3, 0.3):
    print(f"h11<0, t={t:+.1f}: {classify_polarization(H3, t)}")

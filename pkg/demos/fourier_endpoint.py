"""
The momentum endpoint is a Fourier transform
=============================================

At ``alpha t = pi/2`` the coordinate is ``w = (i/alpha) p``. Converting the
half-form to ``sqrt(dp)`` and undoing the gauge factor ``e^{-ipx}`` leaves
the Fourier transform of the initial state, up to the constant ``sqrt(i)``.
"""
import cmath

import numpy as np

from kshflow import DP, PiTime, coherent_state, fourier_on_gaussian, ksh_transform

x, p = np.meshgrid(np.linspace(-3, 3, 11), np.linspace(-3, 3, 11), indexing="ij")

for alpha in (0.5, 1.0, 2.0):
    for Y in [(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5)]:
        U = ksh_transform(alpha, PiTime(1, 2), Y)
        print(f"alpha={alpha}  frame {U.frame}", end="  ")
        U = U.in_frame(DP)
        Fpsi = fourier_on_gaussian(coherent_state(*Y))
        dev = np.max(np.abs(U(p, x) - cmath.sqrt(1j) * np.exp(-1j * p * x) * Fpsi(p)))
        print(f"Y={Y}  max deviation {dev:.2e}")

"""
General hyperbolic Hamiltonians by reduction
=============================================

Any hyperbolic ``H`` with ``h11 != 0`` is carried to ``+-(p^2 - alpha^2 x^2)/2``
by the time-one flow of ``f = beta x p + gamma x^2 / 2``. Conjugating by the
quantized and prequantized flows of ``f`` moves the KSH map along too.
"""
import math

import numpy as np

from kshflow import (
    QuadraticHamiltonian,
    canonical_reduction,
    coherent_state,
    holomorphic_coordinate,
    ksh_conjugated,
    ksh_generic,
    polarization_residual,
    polarized_inner,
    reduction_pullback_residual,
)
from kshflow.verify import quad_norm_polarized

rng = np.random.default_rng(3)
pts = rng.uniform(-2, 2, size=(25, 2))

# %%
for coeffs in [(4, 0, -1), (2, 1, -1), (-3, 0.5, 1)]:
    H = QuadraticHamiltonian(*coeffs)
    R = canonical_reduction(H)
    print(f"H={coeffs}: beta={R.beta:.4f} gamma={R.gamma:.4f} H1={R.h1}  "
          f"pullback residual {reduction_pullback_residual(H, R, pts):.1e}")

# %%
# The conjugated map agrees with evolving the state directly, and its
# output is a unit vector polarized along ``w_tau`` of the original ``H``.
for coeffs in [(2, 1, -1), (-3, 0.5, 1)]:
    H = QuadraticHamiltonian(*coeffs)
    t = math.copysign(0.3 * math.pi / (2 * H.alpha()), H.h11)
    F = ksh_conjugated(H, t, (0.5, -0.5))
    G = ksh_generic(H, t, coherent_state(0.5, -0.5)).in_frame(F.frame)
    print(f"H={coeffs} t={t:+.3f}: |conjugated - direct| = {np.max(np.abs(F(pts[:, 0], pts[:, 1]) - G(pts[:, 0], pts[:, 1]))):.1e}, "
          f"norm {polarized_inner(F, F).real:.12f} / {quad_norm_polarized(F):.12f}, "
          f"residual {polarization_residual(F, holomorphic_coordinate(H, t), pts):.1e}")

"""
Unitarity of the KSH map on coherent states
============================================

The image of a coherent state is a Gaussian section polarized along
``w_tau``. Its norm uses the half-form density ``sqrt(Im(conj(a) b))``. We
compute the norm in closed form and by brute-force quadrature, then compare
whole Gram matrices.
"""
import math

import numpy as np

from kshflow import coherent_state, ksh_transform, polarized_inner, schrodinger_inner
from kshflow.verify import gram_isometry_defect, quad_norm_polarized

alpha = 1.0

# %%
# Norms across the Kahler window, including the momentum endpoint where the
# pairing becomes a one-dimensional integral over the leaf space.
for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
    t = frac * math.pi / (2 * alpha)
    F = ksh_transform(alpha, t, (1.0, -1.0))
    print(f"t={t:.4f}  closed={polarized_inner(F, F).real:.15f}  quadrature={quad_norm_polarized(F):.15f}")

# %%
# Inner products, not just norms, are preserved.
Ys = [(0, 0), (0, 2), (1, 0), (1, 2), (-1, 1)]
t = math.pi / 6
S = np.array([[schrodinger_inner(coherent_state(*a), coherent_state(*b)) for b in Ys] for a in Ys])
U = np.array([[polarized_inner(ksh_transform(alpha, t, a), ksh_transform(alpha, t, b)) for b in Ys] for a in Ys])
print("max |S - U| =", np.max(np.abs(S - U)))
print("harness     =", gram_isometry_defect(Ys, alpha, t))

# %%
# Past the momentum polarization the metric turns negative and the images
# stop being normalizable.
F = ksh_transform(alpha, 2.0, (0.0, 0.0))
print("eigenvalues of Re M at t=2:", np.linalg.eigvalsh(F.quad_form.real))
print("quadrature:", quad_norm_polarized(F))

"""Closed-form algebra of line and phase-space Gaussians.

All sections live in the fixed gauge ``nabla 1 = i p dx``. A
:class:`LineGaussian` is a function of a single real variable (``x`` for the
frame ``sqrt(dx)``, ``p`` for ``sqrt(dp)``); a :class:`PhaseSpaceGaussian` is
a function of ``(p, x)`` carrying a half-form frame ``sqrt(dw)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics import DP, DX, HolomorphicCoordinate
from .errors import DivergentIntegral

__all__ = [
    "LineGaussian",
    "PhaseSpaceGaussian",
    "GaussianSuperposition",
    "coherent_state",
    "schrodinger_inner",
    "polarized_inner",
    "heisenberg_shift",
    "polarization_residual",
    "halfform_convert",
    "embed",
    "to_momentum_gauge",
    "sqrt_det_right_half_plane",
    "is_real_frame",
]

SQRT_PI = math.sqrt(math.pi)
# Relative threshold below which dw ^ conj(dw) is treated as zero.
REAL_FRAME_TOL = 1e-12


@dataclass(frozen=True)
class LineGaussian:
    """``C exp(-i P (u - Q) - b/2 (u - Q)^2) (x) sqrt(frame)``.

    ``u`` is ``x`` for the frame ``dx`` and ``p`` for ``dp``. All four
    parameters may be complex.
    """

    prefactor: complex
    center_p: complex
    center_q: complex
    width: complex
    frame: HolomorphicCoordinate = DX

    def __post_init__(self):
        if self.frame not in (DX, DP):
            raise ValueError("LineGaussian frames are dx or dp")

    def is_normalizable(self) -> bool:
        return complex(self.width).real > 0

    def poly(self) -> Tuple[complex, complex, complex]:
        """``(b, c, k)`` with exponent ``-b/2 u^2 + c u + k`` (prefactor apart)."""
        b, P, Q = complex(self.width), complex(self.center_p), complex(self.center_q)
        return b, b * Q - 1j * P, 1j * P * Q - 0.5 * b * Q * Q

    @classmethod
    def from_poly(cls, b, c, k, prefactor=1.0, frame=DX, center_q=None) -> "LineGaussian":
        """Inverse of :meth:`poly`; the center defaults to ``Re(c / b)``."""
        b, c = complex(b), complex(c)
        if center_q is None:
            center_q = (c / b).real if abs(b) > 0 else 0.0
        Q = center_q
        P = 1j * (c - b * Q)
        k_here = 1j * P * Q - 0.5 * b * Q * Q
        return cls(complex(prefactor) * cmath.exp(k - k_here), P, Q, b, frame)

    def __call__(self, u):
        u = np.asarray(u)
        d = u - self.center_q
        return self.prefactor * np.exp(-1j * self.center_p * d - 0.5 * self.width * d * d)

    def scaled(self, factor: complex) -> "LineGaussian":
        return replace(self, prefactor=self.prefactor * factor)


@dataclass(frozen=True)
class PhaseSpaceGaussian:
    """``prefactor * exp(-1/2 v^T M v - i L . v) (x) sqrt(dw)``.

    ``v = (p - P, x - Q)`` is the displacement from the real center
    ``(P, Q)``; ``M`` is a complex symmetric 2x2 matrix in the same ordering
    and ``L = (L_p, L_x)``. ``frame`` is the coordinate ``w``.
    """

    prefactor: complex
    center_p: float
    center_q: float
    quad_form: np.ndarray
    linear_phase: np.ndarray
    frame: HolomorphicCoordinate

    def __post_init__(self):
        M = np.asarray(self.quad_form, dtype=complex)
        object.__setattr__(self, "quad_form", 0.5 * (M + M.T))
        object.__setattr__(self, "linear_phase", np.asarray(self.linear_phase, dtype=complex))

    @property
    def center(self) -> np.ndarray:
        return np.array([self.center_p, self.center_q], dtype=float)

    def __call__(self, p, x):
        p, x = np.asarray(p), np.asarray(x)
        dp, dx = p - self.center_p, x - self.center_q
        M, L = self.quad_form, self.linear_phase
        expo = -0.5 * (M[0, 0] * dp * dp + 2 * M[0, 1] * dp * dx + M[1, 1] * dx * dx)
        expo = expo - 1j * (L[0] * dp + L[1] * dx)
        return self.prefactor * np.exp(expo)

    def poly(self) -> Tuple[np.ndarray, np.ndarray, complex]:
        """Absolute form ``-1/2 z^T M z + J . z + k`` with ``z = (p, x)``."""
        M, L, z0 = self.quad_form, self.linear_phase, self.center
        J = M @ z0 - 1j * L
        k = -0.5 * z0 @ M @ z0 + 1j * L @ z0
        return M, J, complex(k)

    @classmethod
    def from_poly(cls, M, J, k, frame, prefactor=1.0, center=(0.0, 0.0)) -> "PhaseSpaceGaussian":
        """Build from the absolute form, re-expanded around ``center = (P, Q)``."""
        M = np.asarray(M, dtype=complex)
        M = 0.5 * (M + M.T)
        J = np.asarray(J, dtype=complex)
        z0 = np.asarray(center, dtype=float)
        L = 1j * (J - M @ z0)
        k_here = -0.5 * z0 @ M @ z0 + 1j * L @ z0
        pref = complex(prefactor) * cmath.exp(complex(k) - k_here)
        return cls(pref, float(z0[0]), float(z0[1]), M, L, frame)

    def recentered(self, P: float, Q: float) -> "PhaseSpaceGaussian":
        M, J, k = self.poly()
        return PhaseSpaceGaussian.from_poly(M, J, k, self.frame, self.prefactor, (P, Q))

    def scaled(self, factor: complex) -> "PhaseSpaceGaussian":
        return replace(self, prefactor=self.prefactor * factor)

    def in_frame(self, coord: HolomorphicCoordinate) -> "PhaseSpaceGaussian":
        return halfform_convert(self, coord)

    def is_zero(self) -> bool:
        return self.prefactor == 0


@dataclass(frozen=True)
class GaussianSuperposition:
    """Finite linear combination of line Gaussians sharing one frame."""

    terms: Tuple[Tuple[complex, LineGaussian], ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((complex(c), g) for c, g in self.terms)
        if len({g.frame for _, g in terms}) > 1:
            raise ValueError("all terms must share the same frame")
        object.__setattr__(self, "terms", terms)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape, dtype=complex)
        for c, g in self.terms:
            out += c * g(u)
        return out

    def inner(self, other: "GaussianSuperposition") -> complex:
        return sum(
            np.conj(c1) * c2 * schrodinger_inner(g1, g2)
            for c1, g1 in self.terms
            for c2, g2 in other.terms
        )

    def norm_squared(self) -> float:
        return float(self.inner(self).real)


def coherent_state(P: float, Q: float) -> LineGaussian:
    """Unit-norm coherent state ``pi^{-1/2} exp(-i P (x-Q) - (x-Q)^2/2)``."""
    return LineGaussian(1 / SQRT_PI, P, Q, 1.0, DX)


def schrodinger_inner(psi1: LineGaussian, psi2: LineGaussian) -> complex:
    """``sqrt(pi) * integral conj(psi1) psi2 du`` in closed form.

    Raises
    ------
    DivergentIntegral
        If ``Re(conj(b1) + b2) <= 0``.
    """
    if psi1.frame != psi2.frame:
        raise ValueError("inner product needs a common frame")
    b1, c1, k1 = psi1.poly()
    b2, c2, k2 = psi2.poly()
    B = np.conj(b1) + b2
    if not B.real > 0:
        raise DivergentIntegral(f"Re(conj(b1) + b2) = {B.real:g} <= 0")
    c = np.conj(c1) + c2
    k = np.conj(k1) + k2
    pref = np.conj(psi1.prefactor) * psi2.prefactor
    return complex(SQRT_PI * pref * cmath.sqrt(2 * math.pi / B) * cmath.exp(c * c / (2 * B) + k))


def sqrt_det_right_half_plane(K: np.ndarray) -> complex:
    """``sqrt(det K)`` continued from the real positive-definite case.

    Valid when the Hermitian part of ``K`` is positive definite, since then
    both eigenvalues lie in the open right half plane.
    """
    lam = np.linalg.eigvals(K)
    return complex(np.prod(np.sqrt(lam.astype(complex))))


def is_real_frame(coord: HolomorphicCoordinate) -> bool:
    scale = abs(coord.a) ** 2 + abs(coord.b) ** 2
    return abs(coord.kahler_density()) <= REAL_FRAME_TOL * scale


def polarized_inner(
    F1: PhaseSpaceGaussian, F2: PhaseSpaceGaussian, density: Optional[float] = None
) -> complex:
    """Pairing of two polarized sections sharing a polarization.

    On a Kahler frame this is
    ``integral conj(F1) F2 sqrt(dw ^ conj(dw) / (-2i dx ^ dp)) dx dp``.
    On a real frame ``w = lam u`` with ``u = c_p p + c_x x`` the sections are
    converted to ``sqrt(du)`` and paired as ``sqrt(pi) integral ... du`` over
    the leaf space, which reproduces the Schrodinger inner product for
    ``w = x``.

    ``F1`` is converted to the frame of ``F2`` first. ``density`` overrides
    ``Im(conj(a) b)`` of that frame.

    Raises
    ------
    DivergentIntegral
        For anti-Kahler frames, or when the real part of the combined
        quadratic form is not positive definite.
    """
    if F1.is_zero() or F2.is_zero():
        return 0j
    frame = F2.frame
    F1 = halfform_convert(F1, frame)
    M1, J1, k1 = F1.poly()
    M2, J2, k2 = F2.poly()
    K = np.conj(M1) + M2
    J = np.conj(J1) + J2
    k = np.conj(k1) + k2
    pref = np.conj(F1.prefactor) * F2.prefactor

    if density is None and is_real_frame(frame):
        lam, (cp, cx) = frame.real_direction()
        n = np.array([cp, cx])
        m = np.array([-cx, cp])
        scale = np.abs(K).max() + 1.0
        if np.abs(K @ m).max() > 1e-8 * scale or abs(J @ m) > 1e-8 * (np.abs(J).max() + 1.0):
            raise ValueError("sections are not constant along the real polarization")
        kap = n @ K @ n
        if not kap.real > 0:
            raise DivergentIntegral(f"leaf-space width {kap:g} has non-positive real part")
        jn = J @ n
        val = SQRT_PI * abs(lam) * pref * cmath.sqrt(2 * math.pi / kap) * cmath.exp(jn * jn / (2 * kap) + k)
        return complex(val)

    if density is None:
        density = frame.kahler_density()
    re_eigs = np.linalg.eigvalsh(K.real)
    if density <= 0 or re_eigs[0] <= 1e-12 * max(abs(re_eigs[-1]), 1.0):
        raise DivergentIntegral(
            f"density={density:g}, eigenvalues of Re K = {re_eigs[0]:g}, {re_eigs[1]:g}"
        )
    sol = np.linalg.solve(K, J)
    val = pref * 2 * math.pi / sqrt_det_right_half_plane(K) * cmath.exp(0.5 * J @ sol + k)
    return complex(val * math.sqrt(density))


def halfform_convert(F: PhaseSpaceGaussian, coord: HolomorphicCoordinate) -> PhaseSpaceGaussian:
    """Re-express ``F (x) sqrt(dw)`` in the frame ``sqrt(dw')`` of a proportional ``w'``.

    With ``w = lam w'`` the coefficient picks up ``sqrt(lam)`` (principal
    branch).
    """
    if coord == F.frame:
        return F
    lam = F.frame.ratio_to(coord)
    return replace(F, prefactor=F.prefactor * cmath.sqrt(lam), frame=coord)


def embed(psi: LineGaussian, center: Optional[Tuple[float, float]] = None) -> PhaseSpaceGaussian:
    """View a line Gaussian as a section on the plane (constant along the fiber)."""
    b, c, k = psi.poly()
    if center is None:
        P, Q = complex(psi.center_p).real, complex(psi.center_q).real
        center = (P, Q) if psi.frame == DX else (Q, P)
    if psi.frame == DX:
        M = np.array([[0, 0], [0, b]])
        J = np.array([0, c])
    else:
        M = np.array([[b, 0], [0, 0]])
        J = np.array([c, 0])
    return PhaseSpaceGaussian.from_poly(M, J, k, psi.frame, psi.prefactor, center)


def to_momentum_gauge(F: PhaseSpaceGaussian) -> PhaseSpaceGaussian:
    """Multiply by ``e^{i p x}``: the gauge change to ``nabla 1 = -i x dp``.

    Only used to compare momentum-polarized sections with functions of ``p``.
    """
    M, J, k = F.poly()
    M = M + np.array([[0, -1j], [-1j, 0]])
    return PhaseSpaceGaussian.from_poly(M, J, k, F.frame, F.prefactor, F.center)


def heisenberg_shift(kind: str, amount: float, state):
    """Apply ``W_{Q0} = exp(-Q0 d/dx)`` or ``V_{P0} = exp(-P0 d/dp - i P0 x)``.

    On parameters: ``W`` moves ``Q -> Q + Q0``; ``V`` moves ``P -> P + P0``
    and multiplies the prefactor by ``exp(-i P0 Q)``.
    """
    kind = kind.upper()
    if kind not in ("V", "W"):
        raise ValueError("kind must be 'V' or 'W'")
    if isinstance(state, LineGaussian):
        if state.frame != DX:
            raise ValueError("Heisenberg shifts act on Schrodinger-frame line Gaussians")
        if kind == "W":
            return replace(state, center_q=state.center_q + amount)
        return replace(
            state,
            center_p=state.center_p + amount,
            prefactor=state.prefactor * cmath.exp(-1j * amount * state.center_q),
        )
    if kind == "W":
        return replace(state, center_q=state.center_q + amount)
    L = state.linear_phase + np.array([0, amount])
    return replace(
        state,
        center_p=state.center_p + amount,
        linear_phase=L,
        prefactor=state.prefactor * cmath.exp(-1j * amount * state.center_q),
    )


def polarization_residual(
    F: PhaseSpaceGaussian, coord: HolomorphicCoordinate, samples: Sequence[Tuple[float, float]]
) -> float:
    """Max of ``|nabla_{X_w} F| / |F|`` over ``(p, x)`` samples.

    With ``X_w = b d/dx - a d/dp`` and ``nabla 1 = i p dx`` this is
    ``|b F_x - a F_p + i p b F| / |F|``, computed from exact derivatives of
    the quadratic exponent.
    """
    pts = np.asarray(samples, dtype=float).reshape(-1, 2)
    p, x = pts[:, 0], pts[:, 1]
    v = np.stack([p - F.center_p, x - F.center_q])
    grad = -(F.quad_form @ v) - 1j * F.linear_phase[:, None]
    res = coord.b * grad[1] - coord.a * grad[0] + 1j * p * coord.b
    return float(np.max(np.abs(res)))

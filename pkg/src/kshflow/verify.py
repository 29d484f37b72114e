"""Independent numerical oracles for the closed forms.

Everything here evaluates states pointwise and integrates numerically, so it
shares no algebra with the closed-form pairings in :mod:`kshflow.gaussians`
or the Mobius engine in :mod:`kshflow.transforms`. The quadratic forms of the
integrands are only used to place quadrature nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import FlowMatrix, QuadraticHamiltonian, hamiltonian_generator
from .errors import BlowUp, DivergentIntegral, ToleranceNotMet
from .gaussians import (
    SQRT_PI,
    GaussianSuperposition,
    LineGaussian,
    PhaseSpaceGaussian,
    is_real_frame,
    coherent_state,
    halfform_convert,
    polarized_inner,
    schrodinger_inner,
)
from .transforms import ksh_transform

__all__ = [
    "QuadratureSpec",
    "OdeSpec",
    "Divergent",
    "integrate_1d",
    "integrate_2d",
    "quad_norm_schrodinger",
    "quad_polarized",
    "quad_norm_polarized",
    "riccati_ode_oracle",
    "gaussian_ode_oracle",
    "gram_isometry_defect",
    "matrix_exp_oracle",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor quadrature on ``center + axes @ diag(scale) @ nodes``.

    The estimate is accepted when doubling ``points_per_axis`` moves it by
    less than ``rel_tol`` (relative to ``max(|I|, 1)``).
    """

    rule: str = "gauss_hermite"
    points_per_axis: int = 48
    center: Tuple[float, float] = (0.0, 0.0)
    scale: Tuple[float, float] = (1.0, 1.0)
    rel_tol: float = 1e-10
    axes: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.rule not in ("gauss_hermite", "tanh_sinh"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.points_per_axis < 16:
            raise ValueError("points_per_axis must be at least 16")
        if min(self.scale) <= 0:
            raise ValueError("scale must be positive")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(
            self.rule, 2 * self.points_per_axis, self.center, self.scale, self.rel_tol, self.axes
        )


@dataclass(frozen=True)
class OdeSpec:
    method: str = "dormand_prince_adaptive"
    max_step: float = 1e-3
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.method not in ("rk4_fixed", "dormand_prince_adaptive"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class Divergent:
    """Result marker for a norm that does not exist (anti-Kahler sections)."""

    min_eigenvalue: float


def _nodes(rule: str, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_R g(u) du`` with a unit-scale Gaussian in mind."""
    if rule == "gauss_hermite":
        xi, w = np.polynomial.hermite.hermgauss(n)
        return xi, w * np.exp(xi * xi)
    # sinh-sinh (tanh-sinh for the whole line); step halves when n doubles.
    # tau in [-2, 2] already reaches |u| ~ 150 scale units
    h = 4.0 / n
    tau = h * np.arange(-(n // 2), n // 2 + 1)
    inner = 0.5 * math.pi * np.sinh(tau)
    u = np.sinh(inner)
    w = h * 0.5 * math.pi * np.cosh(tau) * np.cosh(inner)
    return u, w


def _check(coarse: complex, fine: complex, rel_tol: float) -> float:
    err = abs(fine - coarse)
    if err > rel_tol * max(abs(fine), 1.0):
        raise ToleranceNotMet(f"refinement changed the estimate by {err:.3g}")
    return err


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec) -> Tuple[complex, float]:
    """``int_R f(u) du`` on ``u = center + scale * node``; returns ``(value, error)``."""

    def once(n):
        u, w = _nodes(spec.rule, n)
        return spec.scale[0] * np.sum(w * f(spec.center[0] + spec.scale[0] * u))

    coarse, fine = once(spec.points_per_axis), once(2 * spec.points_per_axis)
    return complex(fine), _check(coarse, fine, spec.rel_tol)


def integrate_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray], spec: QuadratureSpec) -> Tuple[complex, float]:
    """``int_R2 f(p, x) dp dx`` with the tensor rule of ``spec``."""
    R = np.eye(2) if spec.axes is None else np.asarray(spec.axes, dtype=float)
    c = np.asarray(spec.center, dtype=float)
    s = np.asarray(spec.scale, dtype=float)
    jac = abs(np.linalg.det(R)) * s[0] * s[1]

    def once(n):
        u, w = _nodes(spec.rule, n)
        U1, U2 = np.meshgrid(u, u, indexing="ij")
        W = np.outer(w, w)
        p = c[0] + R[0, 0] * s[0] * U1 + R[0, 1] * s[1] * U2
        x = c[1] + R[1, 0] * s[0] * U1 + R[1, 1] * s[1] * U2
        return jac * np.sum(W * f(p, x))

    coarse, fine = once(spec.points_per_axis), once(2 * spec.points_per_axis)
    return complex(fine), _check(coarse, fine, spec.rel_tol)


def _auto_spec_1d(psi: GaussianSuperposition, rel_tol: float) -> QuadratureSpec:
    gs = [g for _, g in psi.terms]
    qs = [complex(g.center_q).real for g in gs]
    scale = 1 / math.sqrt(min(complex(g.width).real for g in gs))
    center = 0.5 * (max(qs) + min(qs))
    if max(qs) - min(qs) > 1e-12 * scale:
        # separated bumps: one Hermite weight cannot match them all
        return QuadratureSpec("tanh_sinh", 128, (center, 0.0), (scale, 1.0), rel_tol)
    return QuadratureSpec("gauss_hermite", 64, (center, 0.0), (scale, 1.0), rel_tol)


def quad_norm_schrodinger(psi: GaussianSuperposition, spec: Optional[QuadratureSpec] = None) -> float:
    """``sqrt(pi) int |psi|^2 dx`` by quadrature."""
    if not psi.terms:
        return 0.0
    if any(not g.is_normalizable() for _, g in psi.terms):
        raise DivergentIntegral("a term has Re(b) <= 0")
    spec = spec or _auto_spec_1d(psi, 1e-10)
    val, _ = integrate_1d(lambda x: np.abs(psi(x)) ** 2, spec)
    return SQRT_PI * val.real


def _combined_form(F1: PhaseSpaceGaussian, F2: PhaseSpaceGaussian):
    M1, J1, _ = F1.poly()
    M2, J2, _ = F2.poly()
    return np.conj(M1) + M2, np.conj(J1) + J2


def _auto_spec_2d(K: np.ndarray, J: np.ndarray, rel_tol: float, n: int = 48) -> QuadratureSpec:
    lam, R = np.linalg.eigh(K.real)
    center = np.linalg.solve(K.real, J.real)
    scale = np.sqrt(2 / lam)
    return QuadratureSpec("gauss_hermite", n, tuple(center), tuple(scale), rel_tol, R)


def quad_polarized(
    F1: PhaseSpaceGaussian,
    F2: PhaseSpaceGaussian,
    density: Optional[float] = None,
    spec: Optional[QuadratureSpec] = None,
    rel_tol: float = 1e-10,
) -> Union[complex, Divergent]:
    """Numerical pairing of two polarized sections (quadrature counterpart of
    :func:`kshflow.gaussians.polarized_inner`).

    Returns :class:`Divergent` when the real part of the combined quadratic
    form has an eigenvalue below ``-1e-10``. Real-polarization frames are
    integrated over the one-dimensional leaf space with the tanh-sinh rule.
    """
    if F1.is_zero() or F2.is_zero():
        return 0j
    frame = F2.frame
    F1 = halfform_convert(F1, frame)
    K, J = _combined_form(F1, F2)
    re_eigs = np.linalg.eigvalsh(K.real)
    if re_eigs[0] < -1e-10:
        return Divergent(float(re_eigs[0]))

    if density is None and is_real_frame(frame):
        lam, (cp, cx) = frame.real_direction()
        n = np.array([cp, cx])
        kap = (n @ K @ n).real
        jn = (J @ n).real
        if not kap > 0:
            return Divergent(float(kap))
        spec = spec or QuadratureSpec("tanh_sinh", 128, (jn / kap, 0.0), (math.sqrt(2 / kap), 1.0), rel_tol)
        f = lambda u: np.conj(F1(u * n[0], u * n[1])) * F2(u * n[0], u * n[1])
        val, _ = integrate_1d(f, spec)
        return complex(SQRT_PI * abs(lam) * val)

    if density is None:
        density = frame.kahler_density()
    if density <= 0 or re_eigs[0] <= 1e-12 * re_eigs[-1]:
        return Divergent(float(min(re_eigs[0], density)))
    spec = spec or _auto_spec_2d(K, J, rel_tol)
    val, _ = integrate_2d(lambda p, x: np.conj(F1(p, x)) * F2(p, x), spec)
    return complex(val * math.sqrt(density))


def quad_norm_polarized(
    F: PhaseSpaceGaussian, density: Optional[float] = None, spec: Optional[QuadratureSpec] = None
) -> Union[float, Divergent]:
    """``int |F|^2 sqrt(density) dx dp`` by quadrature, or :class:`Divergent`."""
    val = quad_polarized(F, F, density, spec)
    return val if isinstance(val, Divergent) else val.real


def gaussian_ode_oracle(
    H: QuadraticHamiltonian, t_final: float, psi: LineGaussian, spec: OdeSpec = OdeSpec(), b_bound: float = 1e6
) -> LineGaussian:
    """Integrate ``d psi/dt = -H^ psi`` inside the Gaussian family.

    State ``(P, Q, b, log C)``. Substituting the ansatz into the equation
    and matching coefficients of ``x^2``, ``x`` and ``1`` gives

        b'  = -h11 b^2 - 2i h12 b + h22
        (P, Q)' = i A (P, Q)
        d'  = h11 (c^2 - b)/2 - i h12/2,   c = b Q - i P,

    for the exponent ``-b/2 x^2 + c x + d``; ``log C`` follows from
    ``d = log C + i P Q - b Q^2 / 2``.

    Raises
    ------
    BlowUp
        If ``|b|`` exceeds ``b_bound`` on the way.
    """
    A = hamiltonian_generator(H)
    h11, h12, h22 = H.h11, H.h12, H.h22

    def rhs(_t, y):
        P, Q, b, _ = y
        dP, dQ = 1j * (A @ np.array([P, Q]))
        db = -h11 * b * b - 2j * h12 * b + h22
        c = b * Q - 1j * P
        dd = 0.5 * h11 * (c * c - b) - 0.5j * h12
        drecenter = 1j * (dP * Q + P * dQ) - 0.5 * db * Q * Q - b * Q * dQ
        return np.array([dP, dQ, db, dd - drecenter])

    y0 = np.array([psi.center_p, psi.center_q, psi.width, np.log(complex(psi.prefactor))], dtype=complex)
    if t_final == 0:
        y = y0
    elif spec.method == "dormand_prince_adaptive":
        def blow(_t, y):
            return b_bound - abs(y[2])

        blow.terminal = True
        sol = solve_ivp(
            rhs, (0.0, t_final), y0, method="DOP853", rtol=1e-12, atol=spec.abs_tol,
            max_step=max(spec.max_step, 1e-2), events=blow,
        )
        if sol.status == 1:
            raise BlowUp(f"|b| exceeded {b_bound:g} at t={sol.t_events[0][0]:g}")
        y = sol.y[:, -1]
    else:
        n = max(1, math.ceil(abs(t_final) / spec.max_step))
        h = t_final / n
        y = y0
        for i in range(n):
            s = i * h
            k1 = rhs(s, y)
            k2 = rhs(s + h / 2, y + h / 2 * k1)
            k3 = rhs(s + h / 2, y + h / 2 * k2)
            k4 = rhs(s + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if abs(y[2]) > b_bound:
                raise BlowUp(f"|b| exceeded {b_bound:g} at t={s + h:g}")
    P, Q, b, logC = y
    return LineGaussian(np.exp(logC), P, Q, b)


def riccati_ode_oracle(alpha: float, t_final: float, Y: Tuple[float, float], spec: OdeSpec = OdeSpec()) -> LineGaussian:
    """ODE image of ``psi_Y`` under ``exp(-t H^)`` for ``H = (p^2 - alpha^2 x^2)/2``."""
    return gaussian_ode_oracle(QuadraticHamiltonian.canonical(alpha), t_final, coherent_state(*Y), spec)


def gram_isometry_defect(Ys: Sequence[Tuple[float, float]], alpha: float, t) -> float:
    """Max entrywise gap between the Schrodinger Gram matrix of ``psi_Y`` and
    the polarized Gram matrix of their KSH images (closed forms)."""
    psis = [coherent_state(*Y) for Y in Ys]
    imgs = [ksh_transform(alpha, t, Y) for Y in Ys]
    n = len(Ys)
    S = np.array([[schrodinger_inner(psis[i], psis[j]) for j in range(n)] for i in range(n)])
    U = np.array([[polarized_inner(imgs[i], imgs[j]) for j in range(n)] for i in range(n)])
    return float(np.max(np.abs(S - U)))


def matrix_exp_oracle(A: np.ndarray, tau: complex, terms: int = 30) -> FlowMatrix:
    """``exp(tau A)`` by Taylor series with scaling and squaring."""
    X = tau * np.asarray(A, dtype=complex)
    norm = np.abs(X).sum(axis=1).max()
    squarings = max(0, math.ceil(math.log2(norm)) + 1) if norm > 0 else 0
    X = X / 2**squarings
    E = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ X / k
        E = E + term
    for _ in range(squarings):
        E = E @ E
    return FlowMatrix(E, complex(tau))

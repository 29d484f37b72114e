"""KSH transforms of Gaussian states for quadratic complexifiers.

Two independent routes are provided for the canonical hyperbolic case
``H = 1/2 (p^2 - alpha^2 x^2)``:

* the trigonometric closed forms (:func:`heat_semigroup`,
  :func:`ksh_transform`), and
* a generic engine valid for any quadratic ``H`` and any line Gaussian
  (:func:`heat_evolve`, :func:`prequantum_evolution`, :func:`ksh_generic`),
  which moves the centers with the complexified flow matrix, the width by the
  Mobius action of that matrix and integrates ``L_H`` along the complex
  trajectory in closed form.

Quantization conventions follow the prequantum data: ``p`` acts as
``i d/dx`` and quadratic observables are Weyl ordered.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .dynamics import (
    DP,
    DX,
    EPS_CLASS,
    HolomorphicCoordinate,
    PiTime,
    QuadraticHamiltonian,
    _as_float_time,
    _phase_trig,
    _sinh_over_x,
    canonical_reduction,
    dilation_flow_matrix,
    flow_matrix,
    hamiltonian_generator,
    holomorphic_coordinate,
    hyperbolic_alpha,
)
from .errors import DivergentIntegral, SingularTime
from .gaussians import LineGaussian, PhaseSpaceGaussian, coherent_state

__all__ = [
    "KshClosedForm",
    "QuadraticObservableOps",
    "FREE_PARTICLE",
    "ksh_closed_form",
    "action_matrix",
    "heat_semigroup",
    "heat_evolve",
    "prequantum_evolution",
    "ksh_transform",
    "ksh_by_composition",
    "ksh_generic",
    "fourier_on_gaussian",
    "segal_bargmann",
    "dilation_phase_unitary",
    "prequantum_dilation",
    "ksh_conjugated",
]

Canonical = Union[float, QuadraticHamiltonian]

#: ``H_E = p^2 / 2``, the complexifier of the classical Segal-Bargmann family.
FREE_PARTICLE = QuadraticHamiltonian(1.0, 0.0, 0.0)


def _canonical_alpha(H: Canonical) -> float:
    if isinstance(H, QuadraticHamiltonian):
        if H.h11 != 1 or H.h12 != 0 or not H.h22 < 0:
            raise ValueError(f"{H} is not of the form 1/2 (p^2 - alpha^2 x^2)")
        return math.sqrt(-H.h22)
    alpha = float(H)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return alpha


@dataclass(frozen=True)
class KshClosedForm:
    """Scalars of the closed-form image of a coherent state."""

    theta: float
    b_tau: complex
    prefactor_abs: float
    action_centers: complex


@dataclass(frozen=True)
class QuadraticObservableOps:
    """The observable ``H``, its ``L_H`` and its Weyl quantization on Gaussians."""

    H: QuadraticHamiltonian

    def lagrangian(self, p, x):
        """``L_H = p dH/dp - H``."""
        return self.H.lagrangian(p, x)

    def hat_h_apply(self, psi: LineGaussian, x):
        """Pointwise ``(H^ psi)(x)`` for ``H^ = 1/2 (-h11 d2 + 2i h12 (x d + 1/2) + h22 x^2)``."""
        H = self.H
        x = np.asarray(x, dtype=float)
        g1 = -psi.width * (x - psi.center_q) - 1j * psi.center_p
        g2 = -psi.width
        val = psi(x)
        return 0.5 * (-H.h11 * (g2 + g1 * g1) + 2j * H.h12 * (x * g1 + 0.5) + H.h22 * x * x) * val


def _sin_theta_plus(alpha: float, t) -> Tuple[float, float, float, float, float]:
    """``theta``, ``sin(alpha t)``, ``cos(alpha t)``, ``sin(theta + alpha t)``, ``cos(theta + alpha t)``."""
    theta = math.atan(alpha)
    s, c, _ = _phase_trig(alpha, t)
    st, ct = math.sin(theta), math.cos(theta)
    return theta, s, c, st * c + ct * s, ct * c - st * s


def _closed_form_width(alpha: float, sin_tp: float, cos_tp: float) -> float:
    """``b_tau = alpha cot(theta + alpha t)``."""
    return alpha * cos_tp / sin_tp


def ksh_closed_form(alpha: float, t, Y: Tuple[float, float]) -> KshClosedForm:
    """Width, prefactor modulus and center action for the canonical case.

    Raises
    ------
    SingularTime
        If ``sin(theta + alpha t)`` vanishes.
    """
    P, Q = Y
    theta, s, c, stp, ctp = _sin_theta_plus(alpha, t)
    if abs(stp) <= EPS_CLASS:
        raise SingularTime(f"sin(theta + alpha t) = {stp:g}")
    s2 = 2 * s * c
    action = s2 / (4 * alpha) * (P * P + alpha**2 * Q * Q) + 1j * s * s * P * Q
    return KshClosedForm(
        theta=theta,
        b_tau=_closed_form_width(alpha, stp, ctp),
        prefactor_abs=math.sqrt(abs(math.sin(theta) / stp)),
        action_centers=action,
    )


def heat_semigroup(H: Canonical, t, Y: Tuple[float, float]) -> LineGaussian:
    """``exp(-t H^) psi_Y`` for the inverted oscillator, in closed form.

    Centers move by the imaginary-time flow, the width is
    ``alpha cot(theta + alpha t)`` with ``tan(theta) = alpha``, and the
    prefactor is ``pi^{-1/2} |sin(theta)/sin(theta + alpha t)|^{1/2}``
    times the exponential of the center action.
    """
    alpha = _canonical_alpha(H)
    P, Q = Y
    cf = ksh_closed_form(alpha, t, Y)
    s, c, _ = _phase_trig(alpha, t)
    P_t = c * P + 1j * alpha * s * Q
    Q_t = 1j * s / alpha * P + c * Q
    C = cf.prefactor_abs / math.sqrt(math.pi) * cmath.exp(cf.action_centers)
    return LineGaussian(C, P_t, Q_t, cf.b_tau, DX)


def _propagator_integrals(kappa: float, t: float) -> Tuple[complex, complex, complex]:
    """Integrals over ``[0, t]`` of ``C^2``, ``C S``, ``S^2``.

    ``C(s) = cos(w s)``, ``S(s) = sin(w s) / w`` with ``w = sqrt(kappa)``.
    """
    omega = cmath.sqrt(kappa)
    u = omega * t
    if abs(u) < 1e-3:
        u2 = u * u
        sinc2 = 1 - 4 * u2 / 6 + 16 * u2 * u2 / 120
        sinc = 1 - u2 / 6 + u2 * u2 / 120
        i_cc = t * (0.5 + 0.5 * sinc2)
        i_ss = t**3 * (1 / 3 - u2 / 15 + 2 * u2 * u2 / 315)
    else:
        sinc2 = cmath.sin(2 * u) / (2 * u)
        sinc = cmath.sin(u) / u
        i_cc = t * (0.5 + 0.5 * sinc2)
        i_ss = t * (1 - sinc2) / (2 * omega * omega)
    i_cs = 0.5 * t * t * sinc * sinc
    return i_cc, i_cs, i_ss


def action_matrix(H: QuadraticHamiltonian, t: float) -> np.ndarray:
    """Symmetric ``G`` with ``int_0^t L_H(S(is) v) ds = 1/2 v^T G v`` for ``v = (p, x)``."""
    B = 1j * hamiltonian_generator(H)
    KL = np.diag([H.h11, -H.h22]).astype(complex)
    i_cc, i_cs, i_ss = _propagator_integrals(-H.disc(), t)
    G = i_cc * KL + i_cs * (KL @ B + B.T @ KL) + i_ss * (B.T @ KL @ B)
    return 0.5 * (G + G.T)


def _flow(H: QuadraticHamiltonian, t) -> np.ndarray:
    if isinstance(t, PiTime):
        return flow_matrix(H, t).entries
    return flow_matrix(H, float(t)).entries


def heat_evolve(H: QuadraticHamiltonian, t, psi: LineGaussian, branch_samples: int = 64) -> LineGaussian:
    """``exp(-t H^) psi`` for any quadratic ``H`` and Schrodinger-frame Gaussian.

    With ``S = S(it)`` on ``(p, x)``: centers ``(P, Q) -> S (P, Q)``; width
    ``b -> (S00 b + i S01) / (S11 - i S10 b)``; prefactor multiplied by
    ``z^{-1/2} exp(int_0^t L_H(P_is, Q_is) ds)`` with
    ``z = S11 - i S10 b``. The square root follows ``z`` continuously
    from ``z = 1`` at ``t = 0``.

    Raises
    ------
    SingularTime
        If ``z`` vanishes (width blow-up) on ``[0, t]``.
    """
    if psi.frame != DX:
        raise ValueError("heat evolution acts on Schrodinger-frame states")
    alpha_like = math.sqrt(abs(H.disc())) or 1.0
    tf = _as_float_time(t, alpha_like)
    S = _flow(H, t)
    b0 = complex(psi.width)
    z = S[1, 1] - 1j * S[1, 0] * b0
    if abs(z) <= EPS_CLASS:
        raise SingularTime(f"width denominator {z:g} vanishes at t={tf:g}")
    b = (S[0, 0] * b0 + 1j * S[0, 1]) / z
    v0 = np.array([psi.center_p, psi.center_q], dtype=complex)
    P_t, Q_t = S @ v0
    action = 0.5 * v0 @ action_matrix(H, tf) @ v0

    ss = np.linspace(0.0, tf, branch_samples + 1)
    zs = np.array([flow_matrix(H, s).entries[1, 1] - 1j * flow_matrix(H, s).entries[1, 0] * b0 for s in ss])
    zs[-1] = z
    if np.min(np.abs(zs)) <= EPS_CLASS:
        raise SingularTime(f"width denominator vanishes before t={tf:g}")
    arg = np.unwrap(np.angle(zs))[-1]
    inv_sqrt_z = abs(z) ** -0.5 * cmath.exp(-0.5j * arg)
    C = psi.prefactor * inv_sqrt_z * cmath.exp(action)
    return LineGaussian(C, P_t, Q_t, b, DX)


def prequantum_evolution(
    H: QuadraticHamiltonian, t, psi: LineGaussian, center: Optional[Tuple[float, float]] = None
) -> PhaseSpaceGaussian:
    """``exp(t rho(H))`` applied to a Schrodinger-frame line Gaussian.

    The state is pulled back through ``x -> w_tau = exp(tau X_H) x``,
    multiplied by ``exp(-int_0^t L_H(p_is, x_is) ds)`` and its half-form is
    carried from ``sqrt(dx)`` to ``sqrt(dw_tau)``.

    ``center`` fixes the real expansion point ``(P, Q)`` of the result; by
    default the complex centers of ``psi`` are flowed back to time zero and
    their real part is used, which recovers ``Y`` for images of ``psi_Y``.
    """
    if psi.frame != DX:
        raise ValueError("prequantum evolution starts from the Schrodinger frame")
    alpha_like = math.sqrt(abs(H.disc())) or 1.0
    tf = _as_float_time(t, alpha_like)
    S = _flow(H, t)
    r = S[1]  # w = r . (p, x)
    coord = HolomorphicCoordinate(complex(S[1, 1]), complex(S[1, 0]))
    b, c, k = psi.poly()
    M = b * np.outer(r, r) + action_matrix(H, tf)
    J = c * r
    if center is None:
        back = np.linalg.solve(S, np.array([psi.center_p, psi.center_q], dtype=complex))
        center = (back[0].real, back[1].real)
    return PhaseSpaceGaussian.from_poly(M, J, k, coord, psi.prefactor, center)


def ksh_transform(H: Canonical, t, Y: Tuple[float, float]) -> PhaseSpaceGaussian:
    """``U_tau psi_Y`` for the canonical hyperbolic ``H``, in closed form.

    The quadratic form over ``(p - P, x - Q)`` is
    ``[[cos(th) sin(at), i cos(th) sin(at)], [i cos(th) sin(at), sin(th) cos(at)]] / sin(at + th)``,
    the linear phase is ``-i P (x - Q)`` and the frame is ``sqrt(dw_t)``.
    Normalizable for ``0 <= t <= pi / (2 alpha)``; later times return the
    (non-normalizable) formula unchanged.
    """
    alpha = _canonical_alpha(H)
    P, Q = Y
    cf = ksh_closed_form(alpha, t, Y)
    theta, s, c, stp, _ = _sin_theta_plus(alpha, t)
    ct, st = math.cos(theta), math.sin(theta)
    M = np.array([[ct * s, 1j * ct * s], [1j * ct * s, st * c]]) / stp
    L = np.array([0.0, P])
    coord = holomorphic_coordinate(QuadraticHamiltonian.canonical(alpha), t)
    return PhaseSpaceGaussian(cf.prefactor_abs / math.sqrt(math.pi), P, Q, M, L, coord)


def ksh_by_composition(H: Canonical, t, Y: Tuple[float, float]) -> PhaseSpaceGaussian:
    """``exp(t rho(H))`` applied to the closed-form ``exp(-t H^) psi_Y``."""
    alpha = _canonical_alpha(H)
    Hc = QuadraticHamiltonian.canonical(alpha)
    return prequantum_evolution(Hc, t, heat_semigroup(alpha, t, Y), center=Y)


def ksh_generic(
    H: QuadraticHamiltonian, t, psi: LineGaussian, center: Optional[Tuple[float, float]] = None
) -> PhaseSpaceGaussian:
    """``U_tau = exp(t rho(H)) exp(-t H^)`` through the generic engine."""
    return prequantum_evolution(H, t, heat_evolve(H, t, psi), center=center)


def fourier_on_gaussian(psi: LineGaussian) -> LineGaussian:
    """``(F psi)(p) = (2 pi)^{-1/2} int e^{i p x} psi(x) dx`` in the frame ``sqrt(dp)``.

    Raises
    ------
    DivergentIntegral
        If ``Re(b) <= 0``.
    """
    if psi.frame != DX:
        raise ValueError("Fourier transform expects a Schrodinger-frame state")
    b, c, k = psi.poly()
    if not b.real > 0:
        raise DivergentIntegral(f"Re(b) = {b.real:g} <= 0")
    return LineGaussian.from_poly(
        1 / b, 1j * c / b, k + c * c / (2 * b), prefactor=psi.prefactor / cmath.sqrt(b), frame=DP
    )


def segal_bargmann(t_tilde: float, Y: Tuple[float, float]) -> PhaseSpaceGaussian:
    """Segal-Bargmann image ``exp(t rho(H_E)) exp(-t H_E^) psi_Y`` of a coherent state.

    ``H_E = p^2/2``: the heat step gives width ``1 / (1 + t)`` and the
    pullback uses ``w = x + i t p``.
    """
    if t_tilde < 0:
        raise ValueError("t_tilde must be non-negative")
    return ksh_generic(FREE_PARTICLE, t_tilde, coherent_state(*Y), center=Y)


def _dilation_chirp(beta: float, gamma: float, s: float) -> complex:
    """Width increment ``i gamma (e^{2 beta s} - 1) / (2 beta)`` of ``exp(-i s f^)``."""
    return 1j * gamma * s * math.exp(beta * s) * _sinh_over_x(beta * s)


def dilation_phase_unitary(beta: float, gamma: float, s: float, psi: LineGaussian) -> LineGaussian:
    """Apply ``exp(-i s f^)`` for ``f^ = i beta x d/dx + i beta/2 + gamma/2 x^2``.

    The result is ``e^{s beta/2} exp(-i gamma (e^{2 beta s} - 1) x^2 / (4 beta)) psi(e^{s beta} x)``.
    """
    if psi.frame != DX:
        raise ValueError("dilations act on Schrodinger-frame states")
    e = math.exp(s * beta)
    b, c, k = psi.poly()
    return LineGaussian.from_poly(
        b * e * e + _dilation_chirp(beta, gamma, s),
        c * e,
        k,
        prefactor=psi.prefactor * math.exp(0.5 * s * beta),
        frame=DX,
    )


def prequantum_dilation(beta: float, gamma: float, s: float, F: PhaseSpaceGaussian) -> PhaseSpaceGaussian:
    """Apply ``exp(-i s rho(f))`` to a polarized section.

    The section is pulled back by the time-``s`` flow of ``X_f``, multiplied
    by ``exp(i int_0^s L_f)`` with ``L_f = -gamma x^2 / 2`` and its frame is
    pulled back with it.
    """
    Phi = dilation_flow_matrix(beta, gamma, s)
    M, J, k = F.poly()
    M = Phi.T @ M @ Phi
    M = M + np.array([[0, 0], [0, _dilation_chirp(beta, gamma, s)]])
    J = Phi.T @ J
    row = np.array([F.frame.b, F.frame.a]) @ Phi
    coord = HolomorphicCoordinate(complex(row[1]), complex(row[0]))
    center = np.linalg.solve(Phi, F.center)
    return PhaseSpaceGaussian.from_poly(M, J, k, coord, F.prefactor, tuple(center))


def ksh_conjugated(H: QuadraticHamiltonian, t, Y: Tuple[float, float]) -> PhaseSpaceGaussian:
    """KSH image of ``psi_Y`` for a general hyperbolic ``H`` via diagonal reduction.

    With ``(beta, gamma, H1) = canonical_reduction(H)`` and
    ``H1 = H o phi_1``:

        U^H = exp(i rho(f)) U^{H1} exp(-i f^),

    where ``U^{H1}`` is evaluated by the generic engine on the (no longer
    coherent) state ``exp(-i f^) psi_Y``. The result is expressed in the
    frame ``sqrt(dw)`` of ``w = exp(tau X_H) x``.

    Raises
    ------
    ZeroH11
        If ``h11 == 0``.
    SingularTime
        From the heat step.
    """
    hyperbolic_alpha(H)
    R = canonical_reduction(H)
    phi = dilation_phase_unitary(R.beta, R.gamma, 1.0, coherent_state(*Y))
    G = ksh_generic(R.h1, t, phi)
    F = prequantum_dilation(R.beta, R.gamma, -1.0, G)
    return F.in_frame(holomorphic_coordinate(H, t)).recentered(*Y)

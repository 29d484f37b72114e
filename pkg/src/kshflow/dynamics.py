"""Quadratic Hamiltonians on the plane and their complexified linear flows.

Phase-space pairs are ordered ``(p, x)`` everywhere in this package: flow
matrices act on the column ``(p, x)``, sample points are ``(p, x)`` pairs and
phase-space centers are ``Y = (P, Q)``.

A quadratic Hamiltonian is stored through the coefficients of

    H = 1/2 (h11 p**2 + 2 h12 p x + h22 x**2),

so ``H = x p`` is ``QuadraticHamiltonian(0, 1, 0)``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NonHyperbolic, OutOfRange, ZeroH11

__all__ = [
    "Conventions",
    "CONVENTIONS",
    "QuadraticHamiltonian",
    "PiTime",
    "FlowMatrix",
    "HolomorphicCoordinate",
    "Polarization",
    "PolarizationClass",
    "ReductionData",
    "EPS_CLASS",
    "hyperbolic_alpha",
    "hamiltonian_generator",
    "flow_matrix",
    "holomorphic_coordinate",
    "classify_polarization",
    "kahler_density",
    "canonical_reduction",
    "dilation_flow_matrix",
    "reduction_pullback_residual",
    "time_reparametrization",
]

#: Tolerance on ``|sin(2 alpha t)|`` below which a time is treated as a
#: real-polarization time.
EPS_CLASS = 1e-12


@dataclass(frozen=True)
class Conventions:
    """Fixed conventions of the prequantum data on ``(R^2, dx ^ dp)``."""

    hbar: float = 1.0
    symplectic_form: str = "dx ^ dp"
    connection_potential: str = "p dx"
    hermitian_norm_of_unit: float = 1.0
    schrodinger_norm_factor: float = math.sqrt(math.pi)


CONVENTIONS = Conventions()


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``H = 1/2 (h11 p^2 + 2 h12 p x + h22 x^2)``."""

    h11: float
    h12: float
    h22: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.h11, self.h12, self.h22)):
            raise ValueError("Hamiltonian coefficients must be finite")

    @classmethod
    def canonical(cls, alpha: float) -> "QuadraticHamiltonian":
        """The inverted oscillator ``1/2 (p^2 - alpha^2 x^2)``."""
        return cls(1.0, 0.0, -alpha * alpha)

    def disc(self) -> float:
        """Hessian determinant ``h11 h22 - h12^2``."""
        return self.h11 * self.h22 - self.h12 * self.h12

    def is_hyperbolic(self) -> bool:
        return self.disc() < 0

    def alpha(self) -> float:
        return hyperbolic_alpha(self)

    def __call__(self, p, x):
        return 0.5 * (self.h11 * p * p + 2 * self.h12 * p * x + self.h22 * x * x)

    def hessian(self) -> np.ndarray:
        """Symmetric matrix ``K`` with ``H = 1/2 v^T K v`` for ``v = (p, x)``."""
        return np.array([[self.h11, self.h12], [self.h12, self.h22]], dtype=float)

    def lagrangian(self, p, x):
        """``L_H = p dH/dp - H``."""
        return 0.5 * (self.h11 * p * p - self.h22 * x * x)


@dataclass(frozen=True)
class PiTime:
    """An exact time ``t`` with ``alpha * t = k * pi / d``.

    Boundary times of the polarization phase diagram are rational multiples
    of ``pi / alpha``; keeping ``k`` and ``d`` as integers lets the
    classification decide those cases exactly.
    """

    k: int
    d: int = 1

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("denominator must be positive")

    @property
    def ratio(self) -> Fraction:
        """``alpha t / pi`` as an exact fraction."""
        return Fraction(self.k, self.d)

    def value(self, alpha: float) -> float:
        return self.k * math.pi / (self.d * alpha)

    def __str__(self):
        return f"{self.k}pi/{self.d}"


TimeLike = Union[float, PiTime]


def _as_float_time(t: TimeLike, alpha: float) -> float:
    return t.value(alpha) if isinstance(t, PiTime) else float(t)


def _exact_sin_cos(r: Fraction) -> Tuple[float, float]:
    """``(sin(pi r), cos(pi r))`` with exact zeros at multiples of pi/2."""
    r = r % 2
    if r.denominator == 1:
        return 0.0, (1.0 if r == 0 else -1.0)
    if r.denominator == 2:
        return (1.0 if r == Fraction(1, 2) else -1.0), 0.0
    angle = math.pi * float(r)
    return math.sin(angle), math.cos(angle)


def _phase_trig(alpha: float, t: TimeLike):
    """``sin(alpha t), cos(alpha t), sin(2 alpha t)``, exact for PiTime."""
    if isinstance(t, PiTime):
        s, c = _exact_sin_cos(t.ratio)
        s2, _ = _exact_sin_cos(2 * t.ratio)
        return s, c, s2
    phase = alpha * t
    return math.sin(phase), math.cos(phase), math.sin(2 * phase)


@dataclass(frozen=True)
class FlowMatrix:
    """``S(tau) = exp(tau A)`` acting on the column ``(p, x)``."""

    entries: np.ndarray
    tau: complex

    def det(self) -> complex:
        m = self.entries
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    def apply(self, p, x):
        """Image ``(p_tau, x_tau)`` of ``(p, x)``; arguments may be complex."""
        m = self.entries
        return m[0, 0] * p + m[0, 1] * x, m[1, 0] * p + m[1, 1] * x

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class HolomorphicCoordinate:
    """The linear function ``w = a x + b p``."""

    a: complex
    b: complex

    def __call__(self, p, x):
        return self.a * x + self.b * p

    def kahler_density(self) -> float:
        """``Im(conj(a) b)``, i.e. ``dw ^ conj(dw) / (-2i dx ^ dp)``."""
        return (np.conj(self.a) * self.b).imag

    def ratio_to(self, other: "HolomorphicCoordinate", rtol: float = 1e-12) -> complex:
        """Scalar ``lam`` with ``self = lam * other``.

        Raises ``ValueError`` when the two coordinates are not proportional.
        """
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        scale = max(abs(a1), abs(b1)) * max(abs(a2), abs(b2))
        if scale == 0:
            raise ValueError("degenerate coordinate")
        if abs(a1 * b2 - b1 * a2) > rtol * scale:
            raise ValueError(f"coordinates {self} and {other} are not proportional")
        return a1 / a2 if abs(a2) >= abs(b2) else b1 / b2

    def real_direction(self) -> Tuple[complex, Tuple[float, float]]:
        """Write a real-polarization coordinate as ``w = lam * (c_p p + c_x x)``.

        The real pair ``(c_p, c_x)`` is normalized to unit length; only
        meaningful when :meth:`kahler_density` vanishes.
        """
        lam = self.a if abs(self.a) >= abs(self.b) else self.b
        cx, cp = (self.a / lam).real, (self.b / lam).real
        norm = math.hypot(cx, cp)
        return lam * norm, (cp / norm, cx / norm)

    def __repr__(self):
        return f"HolomorphicCoordinate(a={complex(self.a):.6g}, b={complex(self.b):.6g})"


DX = HolomorphicCoordinate(1.0, 0.0)
DP = HolomorphicCoordinate(0.0, 1.0)


class Polarization(enum.Enum):
    SCHRODINGER = "Schrodinger"
    KAHLER = "Kahler"
    ANTI_KAHLER = "AntiKahler"
    REAL_LINE = "RealLine"


@dataclass(frozen=True)
class PolarizationClass:
    """Classification tag; ``direction = (c_x, c_p)`` for real lines."""

    tag: Polarization
    direction: Optional[Tuple[float, float]] = None

    def __str__(self):
        if self.tag is Polarization.REAL_LINE:
            return f"{self.tag.value}({self.direction[0]:g},{self.direction[1]:g})"
        return self.tag.value


@dataclass(frozen=True)
class ReductionData:
    """Parameters of ``f = beta x p + gamma/2 x^2`` and the reduced ``H1``."""

    beta: float
    gamma: float
    h1: QuadraticHamiltonian


def hyperbolic_alpha(H: QuadraticHamiltonian) -> float:
    """Return ``alpha = sqrt(-det Hess H)``.

    Raises
    ------
    NonHyperbolic
        If ``det Hess H >= 0``.
    """
    disc = H.disc()
    if not disc < 0:
        raise NonHyperbolic(f"det Hess(H) = {disc:g} is not negative")
    return math.sqrt(-disc)


def hamiltonian_generator(H: QuadraticHamiltonian) -> np.ndarray:
    """Matrix ``A`` with ``d/dt (p, x) = A (p, x)`` along the flow of ``X_H``."""
    return np.array([[-H.h12, -H.h22], [H.h11, H.h12]], dtype=float)


def _cosh_sinhc(kappa: float, tau: complex) -> Tuple[complex, complex]:
    """``cosh(w tau)`` and ``sinh(w tau) / w`` for ``w = sqrt(kappa)``."""
    omega = cmath.sqrt(kappa)
    u = omega * tau
    if abs(u) < 1e-4:
        u2 = u * u
        return 1 + u2 / 2 + u2 * u2 / 24, tau * (1 + u2 / 6 + u2 * u2 / 120)
    return cmath.cosh(u), cmath.sinh(u) / omega


def flow_matrix(H: QuadraticHamiltonian, t: TimeLike, imaginary_time: bool = True) -> FlowMatrix:
    """Flow ``S(tau) = exp(tau A)`` of ``X_H`` at ``tau = i t`` (or ``tau = t``).

    Uses ``A^2 = -det(Hess H) I``, so the exponential is
    ``cosh(w tau) I + sinh(w tau)/w A``. For a hyperbolic ``H`` at imaginary
    time this is ``cos(alpha t) I + i sin(alpha t)/alpha A``, evaluated with
    exact trigonometric values when ``t`` is a :class:`PiTime`.
    """
    A = hamiltonian_generator(H)
    kappa = -H.disc()
    if imaginary_time and kappa > 0:
        alpha = math.sqrt(kappa)
        s, c, _ = _phase_trig(alpha, t)
        entries = c * np.eye(2) + (1j * s / alpha) * A
        return FlowMatrix(entries.astype(complex), 1j * _as_float_time(t, alpha))
    if isinstance(t, PiTime):
        raise TypeError("PiTime needs a hyperbolic Hamiltonian")
    tau = 1j * t if imaginary_time else complex(t)
    ch, sh = _cosh_sinhc(kappa, tau)
    entries = ch * np.eye(2) + sh * A
    if not imaginary_time:
        entries = entries.real
    return FlowMatrix(np.asarray(entries), tau)


def holomorphic_coordinate(H: QuadraticHamiltonian, t: TimeLike) -> HolomorphicCoordinate:
    """The polarized coordinate ``w_tau = exp(tau X_H) x`` at ``tau = i t``.

    Returns ``a = cos(alpha t) + i h12 sin(alpha t)/alpha`` and
    ``b = i h11 sin(alpha t)/alpha`` for hyperbolic ``H``.
    """
    S = flow_matrix(H, t, imaginary_time=True).entries
    return HolomorphicCoordinate(complex(S[1, 1]), complex(S[1, 0]))


def kahler_density(H: QuadraticHamiltonian, t: TimeLike) -> float:
    """``(h11 / 2 alpha) sin(2 alpha t)``; positive on Kahler times."""
    alpha = hyperbolic_alpha(H)
    _, _, s2 = _phase_trig(alpha, t)
    return H.h11 * s2 / (2 * alpha)


def classify_polarization(H: QuadraticHamiltonian, t: TimeLike) -> PolarizationClass:
    """Type of the polarization reached from the Schrodinger one at ``tau = i t``.

    Float times with ``|sin(2 alpha t)| <= EPS_CLASS`` fall in the real
    branches; :class:`PiTime` arguments are decided exactly.
    """
    alpha = hyperbolic_alpha(H)
    if H.h11 == 0:
        return PolarizationClass(Polarization.SCHRODINGER)
    s, c, s2 = _phase_trig(alpha, t)
    if abs(s2) <= EPS_CLASS:
        if abs(s) <= abs(c):
            return PolarizationClass(Polarization.SCHRODINGER)
        return PolarizationClass(Polarization.REAL_LINE, (H.h12, H.h11))
    if H.h11 * s2 > 0:
        return PolarizationClass(Polarization.KAHLER)
    return PolarizationClass(Polarization.ANTI_KAHLER)


def _x_over_sinh(b: float) -> float:
    if abs(b) < 1e-4:
        b2 = b * b
        return 1 - b2 / 6 + 7 * b2 * b2 / 360
    return b / math.sinh(b)


def _sinh_over_x(b: float) -> float:
    if abs(b) < 1e-4:
        b2 = b * b
        return 1 + b2 / 6 + b2 * b2 / 120
    return math.sinh(b) / b


def canonical_reduction(H: QuadraticHamiltonian) -> ReductionData:
    """Diagonalize ``H`` with the flow of ``f = beta x p + gamma/2 x^2``.

    With ``beta = 1/2 log|h11|`` and
    ``gamma = (h12/h11) (beta/sinh beta) e^beta`` the time-one pullback of
    ``H`` is ``H1 = 1/2 sign(h11) (p^2 + det(Hess H) x^2)``.
    """
    if H.h11 == 0:
        raise ZeroH11("canonical reduction needs h11 != 0")
    beta = 0.5 * math.log(abs(H.h11))
    gamma = H.h12 / H.h11 * _x_over_sinh(beta) * math.exp(beta)
    sign = math.copysign(1.0, H.h11)
    return ReductionData(beta, gamma, QuadraticHamiltonian(sign, 0.0, sign * H.disc()))


def dilation_flow_matrix(beta: float, gamma: float, s: float) -> np.ndarray:
    """Time-``s`` flow of ``X_f`` on ``(p, x)`` for ``f = beta x p + gamma/2 x^2``.

    ``x_s = e^{s beta} x`` and ``p_s = e^{-s beta} p - (gamma/beta) sinh(s beta) x``.
    """
    return np.array(
        [
            [math.exp(-s * beta), -gamma * s * _sinh_over_x(s * beta)],
            [0.0, math.exp(s * beta)],
        ]
    )


def reduction_pullback_residual(
    H: QuadraticHamiltonian, R: ReductionData, samples: Sequence[Tuple[float, float]]
) -> float:
    """Max over ``(p, x)`` samples of ``|H(p_1, x_1) - H1(p, x)|``.

    ``(p_1, x_1)`` is the time-one flow of ``X_f``, the direction for which
    the identity case and the diagonal anchors vanish.
    """
    pts = np.asarray(samples, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("samples must be nonempty")
    p, x = pts[:, 0], pts[:, 1]
    F = dilation_flow_matrix(R.beta, R.gamma, 1.0)
    p1 = F[0, 0] * p + F[0, 1] * x
    x1 = F[1, 1] * x
    return float(np.max(np.abs(H(p1, x1) - R.h1(p, x))))


def time_reparametrization(alpha: float, t: float) -> float:
    """``t_tilde = tan(alpha t) / alpha`` on ``0 <= t < pi / (2 alpha)``.

    At related times ``w_tau = cos(alpha t) (x + i t_tilde p)``.
    """
    if not 0 <= t < math.pi / (2 * alpha):
        raise OutOfRange(f"t={t!r} outside [0, pi/(2 alpha))")
    return math.tan(alpha * t) / alpha

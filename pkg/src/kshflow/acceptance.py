"""The acceptance suite: ten end-to-end checks with fixed tolerances.

Each check returns a :class:`CriterionResult`; :func:`run_all` runs them in
order. Random draws use ``numpy.random.default_rng(seed)`` so a run is
reproducible.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .dynamics import (
    DP,
    PiTime,
    Polarization,
    QuadraticHamiltonian,
    canonical_reduction,
    classify_polarization,
    flow_matrix,
    hamiltonian_generator,
    holomorphic_coordinate,
    kahler_density,
    EPS_CLASS,
    reduction_pullback_residual,
)
from .gaussians import (
    coherent_state,
    heisenberg_shift,
    polarization_residual,
    polarized_inner,
)
from .transforms import (
    fourier_on_gaussian,
    heat_semigroup,
    ksh_by_composition,
    ksh_conjugated,
    ksh_transform,
    segal_bargmann,
)
from .verify import (
    Divergent,
    OdeSpec,
    gram_isometry_defect,
    matrix_exp_oracle,
    quad_norm_polarized,
    riccati_ode_oracle,
)

__all__ = ["CriterionResult", "CRITERIA", "DEFAULT_TOLERANCES", "run_all", "run_one"]

ALPHAS = (0.5, 1.0, 2.0)

DEFAULT_TOLERANCES: Dict[str, float] = {
    "closed_norm": 1e-12,
    "quad_norm": 1e-8,
    "gram": 1e-8,
    "intertwining": 1e-12,
    "fourier": 1e-10,
    "sb": 1e-9,
    "reduction_pullback": 1e-10,
    "reduction_norm": 1e-8,
    "reduction_residual": 1e-8,
    "ode": 1e-6,
    "matrix_exp": 1e-10,
    "factorization": 1e-12,
    "periodicity": 1e-12,
}


@dataclass(frozen=True)
class CriterionResult:
    id: str
    passed: bool
    measured: Dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "measured", {k: float(v) for k, v in self.measured.items()})

    def line(self) -> str:
        vals = " ".join(f"{k}={v:.3g}" for k, v in self.measured.items())
        return f"{self.id:<16} {'PASS' if self.passed else 'FAIL'}  {vals}"


def _interior_times(alpha: float, n: int = 9) -> np.ndarray:
    return np.arange(1, n + 1) / (n + 1) * math.pi / (2 * alpha)


def _grid(lo: float, hi: float, n: int):
    u = np.linspace(lo, hi, n)
    return np.meshgrid(u, u, indexing="ij")


def _random_hyperbolic(rng: np.random.Generator) -> QuadraticHamiltonian:
    while True:
        h11 = rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 5.0)
        h12, h22 = rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0)
        H = QuadraticHamiltonian(h11, h12, h22)
        if -H.disc() > 0.05:
            return H


def unitarity(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    P, Q = _grid(-2.0, 2.0, 5)
    closed = quad = 0.0
    for alpha in ALPHAS:
        for t in _interior_times(alpha):
            for Y in zip(P.ravel(), Q.ravel()):
                F = ksh_transform(alpha, float(t), Y)
                closed = max(closed, abs(polarized_inner(F, F) - 1))
                qn = quad_norm_polarized(F)
                quad = max(quad, math.inf if isinstance(qn, Divergent) else abs(qn - 1))
    ok = closed <= tol["closed_norm"] and quad <= tol["quad_norm"]
    return CriterionResult("unitarity", ok, {"closed_norm_dev": closed, "quad_norm_dev": quad})


def gram_isometry(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    worst = 0.0
    for alpha in ALPHAS:
        for t in _interior_times(alpha):
            Ys = [tuple(y) for y in rng.uniform(-2.0, 2.0, size=(6, 2))]
            worst = max(worst, gram_isometry_defect(Ys, alpha, float(t)))
    return CriterionResult("gram_isometry", worst <= tol["gram"], {"max_defect": worst})


def intertwining(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    """``U W = W U`` and ``U V = V U`` on coherent states, checked pointwise.

    The shifted image is compared both with the parameter-level shift and
    with the operators applied to function values:
    ``(W F)(p, x) = F(p, x - Q0)``, ``(V F)(p, x) = e^{-i P0 x} F(p - P0, x)``.
    """
    p, x = _grid(-2.0, 2.0, 5)
    w_dev = v_dev = 0.0
    for _ in range(100):
        alpha = float(rng.choice(ALPHAS))
        t = rng.uniform(0.05, 0.95) * math.pi / (2 * alpha)
        Pc, Qc = rng.uniform(-2.0, 2.0, size=2)
        P0, Q0 = rng.uniform(-1.5, 1.5, size=2)
        F = ksh_transform(alpha, t, (Pc, Qc))
        scale = np.max(np.abs(F(p, x))) + 1.0

        lhs = ksh_transform(alpha, t, (Pc, Qc + Q0))
        shifted = heisenberg_shift("W", Q0, F)
        w_dev = max(
            w_dev,
            np.max(np.abs(lhs(p, x) - shifted(p, x))) / scale,
            np.max(np.abs(lhs(p, x) - F(p, x - Q0))) / scale,
        )

        # V psi_Y = e^{-i P0 Q} psi_{(P + P0, Q)}
        lhs = ksh_transform(alpha, t, (Pc + P0, Qc)).scaled(cmath.exp(-1j * P0 * Qc))
        shifted = heisenberg_shift("V", P0, F)
        v_dev = max(
            v_dev,
            np.max(np.abs(lhs(p, x) - shifted(p, x))) / scale,
            np.max(np.abs(lhs(p, x) - np.exp(-1j * P0 * x) * F(p - P0, x))) / scale,
        )
    ok = max(w_dev, v_dev) <= tol["intertwining"]
    return CriterionResult("intertwining", ok, {"w_dev": w_dev, "v_dev": v_dev})


def fourier_endpoint(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    x, p = _grid(-3.0, 3.0, 11)
    worst = 0.0
    for Y in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.5, 0.5), (2.0, -2.0)]:
        U = ksh_transform(1.0, PiTime(1, 2), Y).in_frame(DP)
        Fpsi = fourier_on_gaussian(coherent_state(*Y))
        ref = cmath.sqrt(1j) * np.exp(-1j * p * x) * Fpsi(p)
        worst = max(worst, np.max(np.abs(U(p, x) - ref)))
    return CriterionResult("fourier_endpoint", worst <= tol["fourier"], {"max_dev": worst})


def sb_equivalence(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    p, x = _grid(-2.0, 2.0, 9)
    dev = const_dev = 0.0
    for t in (math.pi / 8, math.pi / 6, math.pi / 4, math.pi / 3):
        for Y in [(0.0, 0.0), (1.0, -1.0), (-0.5, 1.5)]:
            S = segal_bargmann(math.tan(t), Y)
            U = ksh_transform(1.0, t, Y)
            dev = max(dev, np.max(np.abs(S(p, x) - U.in_frame(S.frame)(p, x))))
            const = S(p, x) / U(p, x)
            const_dev = max(const_dev, np.max(np.abs(const - math.sqrt(math.cos(t)))))
    ok = dev <= tol["sb"] and const_dev <= tol["sb"]
    return CriterionResult("sb_equivalence", ok, {"max_dev": dev, "constant_dev": const_dev})


def phase_diagram(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    mismatches = periodic_breaks = boundary_errors = 0
    for alpha in ALPHAS:
        H = QuadraticHamiltonian.canonical(alpha)
        ts = np.linspace(0.0, 2 * math.pi / alpha, 1000)
        for t in ts:
            t = float(t)
            cls = classify_polarization(H, t).tag
            d = kahler_density(H, t)
            if d > EPS_CLASS:
                expected = {Polarization.KAHLER}
            elif d < -EPS_CLASS:
                expected = {Polarization.ANTI_KAHLER}
            else:
                expected = {Polarization.SCHRODINGER, Polarization.REAL_LINE}
            mismatches += cls not in expected
            periodic_breaks += cls != classify_polarization(H, t + math.pi / alpha).tag
        for k in range(5):
            c = classify_polarization(H, PiTime(k, 2))
            if k % 2 == 0:
                boundary_errors += c.tag != Polarization.SCHRODINGER
            else:
                boundary_errors += c.tag != Polarization.REAL_LINE or tuple(c.direction) != (0.0, 1.0)
    ok = mismatches == periodic_breaks == boundary_errors == 0
    return CriterionResult(
        "phase_diagram",
        ok,
        {"sign_mismatches": mismatches, "periodicity_breaks": periodic_breaks, "boundary_errors": boundary_errors},
    )


def anti_kahler_collapse(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    worst_eig = -math.inf
    divergent = 0
    for t in (1.8, 2.0, 2.5):
        F = ksh_transform(1.0, t, (0.5, -0.5))
        worst_eig = max(worst_eig, float(np.linalg.eigvalsh(F.quad_form.real)[0]))
        divergent += isinstance(quad_norm_polarized(F), Divergent)
    ok = worst_eig < 0 and divergent == 3
    return CriterionResult("anti_kahler", ok, {"max_min_eig": worst_eig, "divergent": divergent})


def reduction(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    p, x = _grid(-2.0, 2.0, 7)
    samples = np.c_[p.ravel(), x.ravel()]
    pull = norm_dev = resid = 0.0
    for _ in range(20):
        H = _random_hyperbolic(rng)
        alpha = H.alpha()
        # Kahler window: h11 sin(2 alpha t) > 0
        t = math.copysign(rng.uniform(0.1, 0.9) * math.pi / (2 * alpha), H.h11)
        Y = tuple(rng.uniform(-1.5, 1.5, size=2))
        pull = max(pull, reduction_pullback_residual(H, canonical_reduction(H), samples))
        F = ksh_conjugated(H, t, Y)
        qn = quad_norm_polarized(F)
        norm_dev = max(norm_dev, math.inf if isinstance(qn, Divergent) else abs(qn - 1))
        resid = max(resid, polarization_residual(F, holomorphic_coordinate(H, t), samples))
    ok = pull < tol["reduction_pullback"] and norm_dev <= tol["reduction_norm"] and resid < tol["reduction_residual"]
    return CriterionResult("reduction", ok, {"pullback": pull, "norm_dev": norm_dev, "residual": resid})


def oracle_agreement(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    ode = 0.0
    for alpha in ALPHAS:
        for t in np.linspace(0.0, 0.45 * math.pi / alpha, 6):
            for Y in [(0.0, 0.0), (1.0, 1.0), (-1.0, 0.5)]:
                g = riccati_ode_oracle(alpha, float(t), Y, OdeSpec(abs_tol=1e-12))
                h = heat_semigroup(alpha, float(t), Y)
                ode = max(
                    ode,
                    abs(g.width - h.width),
                    abs(g.center_p - h.center_p),
                    abs(g.center_q - h.center_q),
                    abs(abs(g.prefactor) - abs(h.prefactor)),
                )
    mexp = 0.0
    for _ in range(50):
        H = _random_hyperbolic(rng)
        t = rng.uniform(-1.5, 1.5) / H.alpha()
        E = matrix_exp_oracle(hamiltonian_generator(H), 1j * t).entries
        mexp = max(mexp, np.max(np.abs(E - flow_matrix(H, t).entries)))
    fact = 0.0
    p, x = _grid(-2.0, 2.0, 7)
    for _ in range(20):
        alpha = float(rng.choice(ALPHAS))
        t = rng.uniform(0.0, 0.95) * math.pi / (2 * alpha)
        Y = tuple(rng.uniform(-2.0, 2.0, size=2))
        a, b = ksh_transform(alpha, t, Y)(p, x), ksh_by_composition(alpha, t, Y)(p, x)
        fact = max(fact, np.max(np.abs(a - b)) / np.max(np.abs(a)))
    ok = ode <= tol["ode"] and mexp <= tol["matrix_exp"] and fact <= tol["factorization"]
    return CriterionResult("oracle_agreement", ok, {"ode_dev": ode, "matrix_exp_dev": mexp, "factorization_dev": fact})


def periodicity(tol: Dict[str, float], rng: np.random.Generator) -> CriterionResult:
    worst = 0.0
    for _ in range(50):
        H = _random_hyperbolic(rng)
        period = 2 * math.pi / H.alpha()
        t = rng.uniform(-period, period)
        w0, w1 = holomorphic_coordinate(H, t), holomorphic_coordinate(H, t + period)
        worst = max(worst, abs(w0.a - w1.a), abs(w0.b - w1.b))
    return CriterionResult("periodicity", worst <= tol["periodicity"], {"max_dev": worst})


CRITERIA: Dict[str, Callable[[Dict[str, float], np.random.Generator], CriterionResult]] = {
    "unitarity": unitarity,
    "gram_isometry": gram_isometry,
    "intertwining": intertwining,
    "fourier_endpoint": fourier_endpoint,
    "sb_equivalence": sb_equivalence,
    "phase_diagram": phase_diagram,
    "anti_kahler": anti_kahler_collapse,
    "reduction": reduction,
    "oracle_agreement": oracle_agreement,
    "periodicity": periodicity,
}


def _tolerances(overrides: Optional[Dict[str, float]]) -> Dict[str, float]:
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in (overrides or {}).items():
        if k not in tol:
            raise KeyError(k)
        tol[k] = float(v)
    return tol


def run_one(name: str, seed: int = 0, tolerances: Optional[Dict[str, float]] = None) -> CriterionResult:
    return CRITERIA[name](_tolerances(tolerances), np.random.default_rng(seed))


def run_all(
    seed: int = 0, tolerances: Optional[Dict[str, float]] = None, names: Optional[Sequence[str]] = None
) -> List[CriterionResult]:
    return [run_one(n, seed, tolerances) for n in (names or CRITERIA)]

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from conftest import hyperbolic_hamiltonians
from kshflow import (
    DP,
    DX,
    DivergentIntegral,
    FREE_PARTICLE,
    LineGaussian,
    PiTime,
    QuadraticHamiltonian,
    QuadraticObservableOps,
    SingularTime,
    action_matrix,
    coherent_state,
    embed,
    flow_matrix,
    fourier_on_gaussian,
    heat_evolve,
    heat_semigroup,
    holomorphic_coordinate,
    ksh_by_composition,
    ksh_closed_form,
    ksh_conjugated,
    ksh_generic,
    ksh_transform,
    polarization_residual,
    polarized_inner,
    prequantum_evolution,
    schrodinger_inner,
    segal_bargmann,
)
from kshflow.transforms import dilation_phase_unitary, prequantum_dilation
from kshflow.verify import gaussian_ode_oracle, quad_norm_polarized

coords = st.floats(-2.0, 2.0)
XS = np.linspace(-2.0, 2.0, 9)


def _mesh(n=7, lo=-2.0, hi=2.0):
    u = np.linspace(lo, hi, n)
    return np.meshgrid(u, u, indexing="ij")


def hat_h_fd(H, psi, x, h=1e-4):
    """Weyl-ordered H^ with p = i d/dx, derivatives by central differences."""
    f0, fp, fm = psi(x), psi(x + h), psi(x - h)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / (h * h)
    return 0.5 * (-H.h11 * d2 + 2j * H.h12 * (x * d1 + 0.5 * f0) + H.h22 * x * x * f0)


def assert_heat_equation(H, evolve, t, x=XS, dt=1e-5, tol=1e-5):
    dpsi = (evolve(t + dt)(x) - evolve(t - dt)(x)) / (2 * dt)
    rhs = -hat_h_fd(H, evolve(t), x)
    np.testing.assert_allclose(dpsi, rhs, atol=tol * (1 + np.max(np.abs(rhs))))


class TestObservableOps:
    @given(hyperbolic_hamiltonians(), coords, coords)
    def test_hat_h_matches_finite_differences(self, H, P, Q):
        psi = LineGaussian(0.5, P, Q, 1.0 + 0.3j)
        ops = QuadraticObservableOps(H)
        np.testing.assert_allclose(ops.hat_h_apply(psi, XS), hat_h_fd(H, psi, XS), atol=2e-6 * (1 + np.abs(psi(XS)).max()))

    def test_lagrangian(self):
        ops = QuadraticObservableOps(QuadraticHamiltonian(1, 0, -4))
        # L = p dH/dp - H = (p^2 + 4 x^2)/2
        assert ops.lagrangian(1.0, 0.5) == pytest.approx(1.0)


class TestHeatSemigroup:
    @given(coords, coords)
    def test_identity_at_zero(self, P, Q):
        g = heat_semigroup(1.0, 0.0, (P, Q))
        np.testing.assert_allclose(g(XS), coherent_state(P, Q)(XS), rtol=1e-14)

    def test_eighth_period_vacuum(self):
        g = heat_semigroup(1.0, math.pi / 4, (0.0, 0.0))
        assert g.prefactor == pytest.approx(2**-0.25 / math.sqrt(math.pi), abs=1e-15)
        assert (g.center_p, g.center_q) == (0, 0)
        assert abs(g.width) < 1e-15

    def test_center_action(self):
        cf = ksh_closed_form(1.0, 0.3, (1.0, 0.0))
        assert cf.action_centers == pytest.approx(0.25 * math.sin(0.6), abs=1e-15)
        assert cf.theta == pytest.approx(math.pi / 4)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t_frac", [0.1, 0.5, 0.9])
    def test_solves_heat_equation(self, alpha, t_frac):
        H = QuadraticHamiltonian.canonical(alpha)
        t = t_frac * 0.45 * math.pi / alpha
        assert_heat_equation(H, lambda s: heat_semigroup(alpha, s, (0.7, -0.4)), t)

    def test_singular_time(self):
        alpha = 1.0
        t_sing = (math.pi - math.atan(alpha)) / alpha
        with pytest.raises(SingularTime):
            heat_semigroup(alpha, t_sing, (0, 0))

    def test_quarter_period_width(self):
        # cot(theta + pi/2) = -tan(theta) = -alpha
        g = heat_semigroup(2.0, PiTime(1, 2), (0, 0))
        assert g.width == pytest.approx(-4.0)

    def test_rejects_non_canonical(self):
        with pytest.raises(ValueError):
            heat_semigroup(QuadraticHamiltonian(2, 1, -1), 0.1, (0, 0))


class TestGenericEngine:
    @given(hyperbolic_hamiltonians(), coords, coords)
    def test_heat_evolve_solves_heat_equation(self, H, P, Q):
        t = 0.2 / H.alpha() * math.copysign(1.0, H.h11)
        psi = coherent_state(P, Q)
        assert_heat_equation(H, lambda s: heat_evolve(H, s, psi), t, tol=5e-5)

    @given(hyperbolic_hamiltonians(), coords, coords)
    def test_heat_evolve_matches_ode(self, H, P, Q):
        t = 0.25 / H.alpha() * math.copysign(1.0, H.h11)
        psi = coherent_state(P, Q)
        a, b = heat_evolve(H, t, psi), gaussian_ode_oracle(H, t, psi)
        np.testing.assert_allclose(a(XS), b(XS), rtol=1e-8, atol=1e-10)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_heat_evolve_matches_closed_form(self, alpha):
        H = QuadraticHamiltonian.canonical(alpha)
        for t in np.linspace(0.05, 1.4, 5) / alpha:
            a = heat_evolve(H, float(t), coherent_state(1.0, -0.5))
            b = heat_semigroup(alpha, float(t), (1.0, -0.5))
            np.testing.assert_allclose(a(XS), b(XS), rtol=1e-12, atol=1e-15)

    @given(hyperbolic_hamiltonians(), st.floats(-1, 1), coords, coords)
    def test_action_matrix_quadrature(self, H, u, p0, x0):
        t = u / H.alpha()
        v = np.array([p0, x0])
        ops = QuadraticObservableOps(H)

        def L(s):
            p, x = flow_matrix(H, s).apply(p0, x0)
            return ops.lagrangian(p, x)

        re = quad(lambda s: L(s).real, 0, t, epsabs=1e-13)[0]
        im = quad(lambda s: L(s).imag, 0, t, epsabs=1e-13)[0]
        assert 0.5 * v @ action_matrix(H, t) @ v == pytest.approx(complex(re, im), abs=1e-10)

    def test_prequantum_at_zero_is_embedding(self):
        g = coherent_state(0.4, -1.1)
        F = prequantum_evolution(QuadraticHamiltonian.canonical(1.0), 0.0, g)
        p, x = _mesh()
        np.testing.assert_allclose(F(p, x), embed(g)(p, x), rtol=1e-14)
        assert F.frame == DX

    def test_prequantum_quarter_period(self):
        g = heat_semigroup(1.0, PiTime(1, 2), (0, 0))
        F = prequantum_evolution(QuadraticHamiltonian.canonical(1.0), PiTime(1, 2), g).in_frame(DP)
        p, x = _mesh()
        expected = cmath.sqrt(1j / math.pi) * np.exp(-1j * x * p - p * p / 2)
        np.testing.assert_allclose(F(p, x), expected, atol=1e-15)


class TestKsh:
    @given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.0, 0.99), coords, coords)
    def test_factorization(self, alpha, u, P, Q):
        t = u * math.pi / (2 * alpha)
        p, x = _mesh()
        a = ksh_transform(alpha, t, (P, Q))(p, x)
        b = ksh_by_composition(alpha, t, (P, Q))(p, x)
        c = ksh_generic(QuadraticHamiltonian.canonical(alpha), t, coherent_state(P, Q)).in_frame(
            holomorphic_coordinate(QuadraticHamiltonian.canonical(alpha), t)
        )(p, x)
        scale = np.max(np.abs(a))
        assert np.max(np.abs(a - b)) <= 1e-12 * scale
        assert np.max(np.abs(a - c)) <= 1e-12 * scale

    @given(coords, coords)
    def test_small_time_is_identity(self, P, Q):
        F = ksh_transform(1.0, 1e-12, (P, Q)).in_frame(DX)
        p, x = _mesh()
        np.testing.assert_allclose(F(p, x), embed(coherent_state(P, Q))(p, x), atol=1e-10)

    @given(coords, coords)
    def test_momentum_endpoint_formula(self, P, Q):
        F = ksh_transform(1.0, PiTime(1, 2), (P, Q)).in_frame(DP)
        p, x = _mesh()
        expected = (
            cmath.sqrt(1j / math.pi)
            * np.exp(-1j * P * (x - Q))
            * np.exp(-1j * (x - Q) * (p - P))
            * np.exp(-((p - P) ** 2) / 2)
        )
        np.testing.assert_allclose(F(p, x), expected, atol=1e-14)

    def test_unit_norm_example(self):
        F = ksh_transform(1.0, math.pi / 6, (1.0, -1.0))
        assert polarized_inner(F, F) == pytest.approx(1, abs=1e-14)
        assert quad_norm_polarized(F) == pytest.approx(1, abs=1e-8)

    @given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.01, 0.99), coords, coords)
    def test_polarized(self, alpha, u, P, Q):
        t = u * math.pi / (2 * alpha)
        F = ksh_transform(alpha, t, (P, Q))
        p, x = _mesh()
        assert polarization_residual(F, F.frame, np.c_[p.ravel(), x.ravel()]) < 1e-10

    @pytest.mark.parametrize("t", [1.8, 2.0, 2.5])
    def test_anti_kahler_collapse(self, t):
        F = ksh_transform(1.0, t, (0.0, 0.0))
        assert np.linalg.eigvalsh(F.quad_form.real)[0] < 0
        with pytest.raises(DivergentIntegral):
            polarized_inner(F, F)

    @given(st.floats(0.05, 1.5), coords, coords, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
    def test_intertwining(self, t, P, Q, P0, Q0):
        p, x = _mesh()
        F = ksh_transform(1.0, t, (P, Q))
        np.testing.assert_allclose(ksh_transform(1.0, t, (P, Q + Q0))(p, x), F(p, x - Q0), rtol=1e-12, atol=1e-15)
        lhs = cmath.exp(-1j * P0 * Q) * ksh_transform(1.0, t, (P + P0, Q))(p, x)
        np.testing.assert_allclose(lhs, np.exp(-1j * P0 * x) * F(p - P0, x), rtol=1e-12, atol=1e-15)


class TestFourier:
    def test_fixed_point(self):
        g = fourier_on_gaussian(coherent_state(0, 0))
        np.testing.assert_allclose(g(XS), np.exp(-XS * XS / 2) / math.sqrt(math.pi), rtol=1e-14)
        assert g.frame == DP

    @pytest.mark.parametrize("Q", [-1.0, 0.5, 2.0])
    def test_translated(self, Q):
        g = fourier_on_gaussian(coherent_state(0, Q))
        ps = np.linspace(-2.5, 2.5, 11)
        expected = np.exp(1j * Q * ps - ps * ps / 2) / math.sqrt(math.pi)
        np.testing.assert_allclose(g(ps), expected, atol=1e-14)
        psi = coherent_state(0, Q)
        for p in ps:
            f = lambda x: np.exp(1j * p * x) * psi(x) / math.sqrt(2 * math.pi)
            val = complex(quad(lambda x: f(x).real, -np.inf, np.inf)[0], quad(lambda x: f(x).imag, -np.inf, np.inf)[0])
            assert val == pytest.approx(g(p), abs=1e-10)

    @given(coords, coords)
    def test_unitary(self, P, Q):
        g = fourier_on_gaussian(coherent_state(P, Q))
        assert schrodinger_inner(g, g) == pytest.approx(1, abs=1e-13)

    @given(st.sampled_from([0.5, 1.0, 2.0]), coords, coords)
    def test_endpoint(self, alpha, P, Q):
        x, p = np.meshgrid(np.linspace(-3, 3, 11), np.linspace(-3, 3, 11), indexing="ij")
        U = ksh_transform(alpha, PiTime(1, 2), (P, Q)).in_frame(DP)
        ref = cmath.sqrt(1j) * np.exp(-1j * p * x) * fourier_on_gaussian(coherent_state(P, Q))(p)
        assert np.max(np.abs(U(p, x) - ref)) < 1e-10


class TestSegalBargmann:
    @given(coords, coords)
    def test_zero_time(self, P, Q):
        p, x = _mesh()
        np.testing.assert_allclose(segal_bargmann(0.0, (P, Q))(p, x), embed(coherent_state(P, Q))(p, x), rtol=1e-14)

    def test_classical_transform_norm(self):
        S = segal_bargmann(1.0, (0.5, -0.5))
        assert (S.frame.a, S.frame.b) == pytest.approx((1, 1j))
        assert polarized_inner(S, S, density=1.0) == pytest.approx(1, abs=1e-14)
        assert quad_norm_polarized(S, density=1.0) == pytest.approx(1, abs=1e-8)

    def test_heat_step_width(self):
        g = heat_evolve(FREE_PARTICLE, 0.7, coherent_state(0, 0))
        assert g.width == pytest.approx(1 / 1.7)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t_frac", [0.25, 1 / 3, 0.5, 2 / 3])
    def test_equivalence(self, alpha, t_frac):
        t = t_frac * math.pi / (2 * alpha)
        p, x = _mesh()
        for Y in [(0.0, 0.0), (1.0, -1.0)]:
            S = segal_bargmann(math.tan(alpha * t) / alpha, Y)
            U = ksh_transform(alpha, t, Y)
            np.testing.assert_allclose(S(p, x), U.in_frame(S.frame)(p, x), atol=1e-9)
            np.testing.assert_allclose(S(p, x) / U(p, x), math.sqrt(math.cos(alpha * t)), atol=1e-9)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            segal_bargmann(-0.1, (0, 0))


class TestDilations:
    @given(st.floats(-1, 1), st.floats(-1.5, 1.5), coords, coords)
    def test_pure_dilation(self, beta, s, P, Q):
        g = coherent_state(P, Q)
        h = dilation_phase_unitary(beta, 0.0, s, g)
        e = math.exp(s * beta)
        np.testing.assert_allclose(h(XS), math.exp(s * beta / 2) * g(e * XS), rtol=1e-12, atol=1e-15)
        assert schrodinger_inner(h, h) == pytest.approx(1, abs=1e-12)

    @given(st.floats(-2, 2), st.floats(-1.5, 1.5))
    def test_pure_chirp(self, gamma, s):
        h = dilation_phase_unitary(0.0, gamma, s, coherent_state(0, 0))
        assert h.width == pytest.approx(1 + 1j * s * gamma)
        assert schrodinger_inner(h, h) == pytest.approx(1, abs=1e-12)

    @given(st.floats(-1, 1), st.floats(-2, 2), st.floats(-1.5, 1.5), coords, coords)
    def test_round_trip(self, beta, gamma, s, P, Q):
        g = coherent_state(P, Q)
        h = dilation_phase_unitary(beta, gamma, -s, dilation_phase_unitary(beta, gamma, s, g))
        np.testing.assert_allclose(h(XS), g(XS), atol=1e-12)

    @given(st.floats(-1, 1), st.floats(-2, 2), coords, coords)
    def test_generator(self, beta, gamma, P, Q):
        # d/ds exp(-i s f^) psi = -i f^ psi, f^ = i beta x d/dx + i beta/2 + gamma x^2 / 2
        g = coherent_state(P, Q)
        s, ds, h = 0.3, 1e-5, 1e-5
        cur = dilation_phase_unitary(beta, gamma, s, g)
        lhs = (
            dilation_phase_unitary(beta, gamma, s + ds, g)(XS) - dilation_phase_unitary(beta, gamma, s - ds, g)(XS)
        ) / (2 * ds)
        d1 = (cur(XS + h) - cur(XS - h)) / (2 * h)
        fhat = 1j * beta * XS * d1 + 0.5j * beta * cur(XS) + 0.5 * gamma * XS * XS * cur(XS)
        np.testing.assert_allclose(lhs, -1j * fhat, atol=1e-6 * (1 + np.max(np.abs(fhat))))

    def test_prequantum_round_trip(self):
        F = ksh_transform(1.0, 0.5, (0.3, 0.2))
        G = prequantum_dilation(0.4, 0.7, -1.0, prequantum_dilation(0.4, 0.7, 1.0, F)).in_frame(F.frame)
        p, x = _mesh()
        np.testing.assert_allclose(G(p, x), F(p, x), atol=1e-13)


class TestConjugated:
    @given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.05, 0.95), coords, coords)
    def test_canonical_matches_closed_form(self, alpha, u, P, Q):
        t = u * math.pi / (2 * alpha)
        H = QuadraticHamiltonian.canonical(alpha)
        p, x = _mesh()
        a, b = ksh_conjugated(H, t, (P, Q))(p, x), ksh_transform(alpha, t, (P, Q))(p, x)
        assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))

    def test_diagonal_norm(self):
        H = QuadraticHamiltonian(4, 0, -1)
        t = 0.3 * math.pi / (2 * H.alpha())
        for P in (-1.0, 0.0, 1.0):
            for Q in (-1.0, 0.0, 1.0):
                assert quad_norm_polarized(ksh_conjugated(H, t, (P, Q))) == pytest.approx(1, abs=1e-8)

    def test_mixed_residual(self, grid25):
        H = QuadraticHamiltonian(2, 1, -1)
        F = ksh_conjugated(H, 0.2, (0.0, 0.0))
        assert polarization_residual(F, holomorphic_coordinate(H, 0.2), grid25) < 1e-8

    @given(hyperbolic_hamiltonians(), st.floats(0.1, 0.9), coords, coords)
    def test_matches_direct_engine(self, H, u, P, Q):
        t = math.copysign(u * math.pi / (2 * H.alpha()), H.h11)
        p, x = _mesh()
        a = ksh_conjugated(H, t, (P, Q))
        b = ksh_generic(H, t, coherent_state(P, Q)).in_frame(a.frame)
        assert np.max(np.abs(a(p, x) - b(p, x))) <= 1e-11 * (np.max(np.abs(b(p, x))) + 1e-300)
        assert polarized_inner(a, a) == pytest.approx(1, abs=1e-10)

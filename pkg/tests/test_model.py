"""Nonlinearity f and the assembled right-hand side F."""

import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from nldlab import (
    BasisLayout,
    EpsilonSequence,
    GridSamples,
    ModelParams,
    TrigVector,
    analyze,
    evaluate_F,
    f,
    f_p,
    f_s,
    synth,
)


class TestModelParams:
    def test_defaults(self, params32):
        assert params32.kappa == 1.25
        assert params32.theta == 0.875
        assert params32.dt == 1e-3
        assert params32.T_final == 50.0
        assert params32.d == pytest.approx(0.75, rel=1e-15)

    def test_kappa_must_be_supercritical(self, layout32):
        for bad in (1.0, 0.5, -1.0):
            with pytest.raises(ValueError):
                ModelParams(layout32, kappa=bad)
        assert ModelParams(layout32, kappa=-1.5).d == pytest.approx(np.sqrt(1.25))

    def test_positive_time_parameters(self, layout32):
        with pytest.raises(ValueError):
            ModelParams(layout32, dt=0.0)
        with pytest.raises(ValueError):
            ModelParams(layout32, T_final=-1.0)

    def test_theta_range_gate(self, layout32):
        with pytest.raises(ValueError):
            ModelParams(layout32, theta=0.5)
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            ModelParams(layout32, theta=0.5, allow_theta_override=True)
        assert len(rec) == 1 and "theta" in str(rec[0].message)


class TestNonlinearity:
    def test_zero_state_annihilated(self, params32):
        x = np.linspace(-np.pi, np.pi, 101)
        assert np.all(f(x, 0.0, 0.0, params32) == 0.0)

    def test_unit_state_cancels_coupling(self, params32):
        # on the plateau: kappa*omega(1)*w(0) = 0, gamma(1) = -1, eta(1) = 1,
        # mu(1) = 0, so f(x,1,0) = eps0*(-1) + eps0*(1 - sin x) = -eps0 sin x
        x = np.linspace(-np.pi, np.pi, 101)
        np.testing.assert_allclose(f(x, 1.0, 0.0, params32),
                                   -params32.eps.eps0 * np.sin(x), atol=1e-17)

    def test_far_field_is_linear_pull(self, params32):
        x = np.linspace(-np.pi, np.pi, 11)
        for s in (3.0, -7.5, 100.0):
            np.testing.assert_array_equal(f(x, s, 7.0, params32), np.full_like(x, -s))

    def test_partials_match_finite_differences(self, params32):
        # coarse check on an irregular cloud; the dense pinned scan lives in
        # the acceptance suite
        rng = np.random.default_rng(7)
        x = rng.uniform(-np.pi, np.pi, 400)
        s = rng.uniform(-3.0, 3.0, 400)
        p = rng.uniform(-3.0, 3.0, 400)
        h = 1e-4
        fd_s = (f(x, s + h, p, params32) - f(x, s - h, p, params32)) / (2 * h)
        fd_p = (f(x, s, p + h, params32) - f(x, s, p - h, params32)) / (2 * h)
        np.testing.assert_allclose(f_s(x, s, p, params32), fd_s, atol=2e-6)
        np.testing.assert_allclose(f_p(x, s, p, params32), fd_p, atol=2e-6)

    def test_s_plus_f_is_bounded_globally(self, params32):
        x = np.linspace(-np.pi, np.pi, 65)[:, None, None]
        # outside the cutoff support the linear pull cancels s identically
        s_far = np.array([-40.0, -5.0, -2.0, 2.0, 5.0, 40.0])[None, :, None]
        p_any = np.array([-40.0, -1.5, 0.0, 3.0, 40.0])[None, None, :]
        far = s_far + f(x, s_far, p_any, params32)
        np.testing.assert_array_equal(far, np.zeros_like(far))
        # so the global sup lives on the core |s|, |p| <= 2 and is modest
        s2 = np.linspace(-2.0, 2.0, 201)[None, :, None]
        p2 = np.linspace(-2.0, 2.0, 201)[None, None, :]
        core = s2 + f(x, s2, p2, params32)
        assert np.isfinite(core).all()
        assert np.max(np.abs(core)) < 3.5

    def test_partial_sups_are_finite(self, params32):
        x = np.linspace(-np.pi, np.pi, 33)[:, None, None]
        s = np.linspace(-4.0, 4.0, 161)[None, :, None]
        p = np.linspace(-4.0, 4.0, 161)[None, None, :]
        assert np.isfinite(f_s(x, s, p, params32)).all()
        assert np.isfinite(f_p(x, s, p, params32)).all()
        assert np.max(np.abs(f_s(x, s, p, params32))) < 10.0
        assert np.max(np.abs(f_p(x, s, p, params32))) < 5.0

    def test_eps0_enters_linearly(self, layout32):
        x, s, p = 0.4, 0.8, -0.3
        base = ModelParams(layout32, eps=EpsilonSequence(0.0))
        probe = ModelParams(layout32, eps=EpsilonSequence(0.1))
        gap = f(x, s, p, probe) - f(x, s, p, base)
        from nldlab import eta, gamma
        assert gap == pytest.approx(0.1 * (gamma(s) + eta(s) * (1 - np.sin(x))), rel=1e-14)


class TestRightHandSide:
    def test_zero_is_fixed_by_F(self, params32):
        out = evaluate_F(TrigVector.zero(params32.layout), params32)
        assert np.all(out.coeffs() == 0.0)

    def test_one_is_fixed_by_F(self, params32):
        # F(1) = 1 + 0 + analyze(-eps0 sin x) + eps0 sin x = 1, with the
        # cancellation happening between exact quadrature and the exact K block
        one = TrigVector.constant(params32.layout, 1.0)
        out = evaluate_F(one, params32)
        np.testing.assert_allclose(out.coeffs(), one.coeffs(), atol=1e-15)

    @pytest.mark.parametrize("M,tol", [(0, 1e-5), (512, 1e-11)])
    def test_matches_quadrature_oracle(self, M, tol):
        # project f(x, u, u_x) for u = 2 cos x directly with adaptive quadrature
        # and compare mode by mode against the pseudospectral path. f composed
        # with the state is smooth but not band-limited, so the default grid
        # carries a small alias floor; oversampling drives it to roundoff.
        layout = BasisLayout(32) if M == 0 else BasisLayout(32, M=M)
        params = ModelParams(layout)
        u = TrigVector.cosine(layout, 1, 2.0)
        fsamp = f(layout.grid, synth(u).values,
                  synth(TrigVector.sine(layout, 1, -2.0)).values, params)
        got = analyze(GridSamples(layout, fsamp))

        def integrand(y, mode, trig):
            val = f(y, 2.0 * np.cos(y), -2.0 * np.sin(y), params)
            return val * (np.cos(mode * y) if trig == "c" else np.sin(mode * y))

        for mode, trig, slot in [(0, "c", 0), (1, "c", 1), (2, "c", 2), (3, "c", 3),
                                 (1, "s", layout.N + 1), (2, "s", layout.N + 2)]:
            val, err = quad(integrand, -np.pi, np.pi, args=(mode, trig),
                            limit=800, epsabs=1e-12, epsrel=1e-12)
            assert err < 1e-8
            scale = 2.0 * np.pi if mode == 0 else np.pi
            assert got.coeffs()[slot] == pytest.approx(val / scale, abs=tol), (mode, trig)

    def test_linear_part_alone(self, layout32):
        # with the coupling switched off F(u) - u - f-term is exactly J u_x
        params = ModelParams(layout32, eps=EpsilonSequence(0.0))
        u = TrigVector.cosine(layout32, 3, 0.25)
        out = evaluate_F(u, params)
        # f(x, s, p) on samples of u is not zero (omega ramp), so compare
        # against the explicitly assembled pieces instead
        from nldlab import apply_J, differentiate
        ux = differentiate(u)
        fsamp = f(layout32.grid, synth(u).values, synth(ux).values, params)
        manual = u + apply_J(ux) + analyze(GridSamples(layout32, fsamp))
        np.testing.assert_array_equal(out.coeffs(), manual.coeffs())

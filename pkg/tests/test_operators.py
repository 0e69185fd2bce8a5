"""Operator bank: mode actions, dense assembly, kernel quadrature oracles.

The diagonal/swap actions coded in the package are cross-checked here against
direct quadrature of the defining kernels:

    (B h)(x) = (1/pi)   int ln|sin((x+y)/2)| h(y) dy
    (J h)(x) = (1/2pi) PV int cot((x+y)/2)  h(y) dy
    (G h)(x) = (1/2pi) PV int cot((y-x)/2)  h(y) dy

so the spectral shortcuts never drift from the integral definitions.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from nldlab import (
    B_CONSTANT_VALUE,
    BasisLayout,
    EpsilonSequence,
    OperatorMatrix,
    TrigVector,
    apply_A,
    apply_A_minus_Jdx,
    apply_B,
    apply_G,
    apply_J,
    apply_K,
    apply_Q,
    apply_Qkappa,
    assemble,
    l2_operator_norm,
    mult_operator,
)

EPS = EpsilonSequence()


# --- quadrature oracles ------------------------------------------------------

def _cot_remainder(u):
    """cot(u/2) - 2/u, smooth on |u| < 2*pi."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-3
    out = np.empty_like(u)
    us = np.where(small, 1.0, u)
    out = 1.0 / np.tan(us / 2.0) - 2.0 / us
    series = -u / 6.0 - u**3 / 360.0 - u**5 / 15120.0
    return float(np.where(small, series, out)) if out.ndim == 0 else np.where(small, series, out)


def b_oracle(h, x):
    """Log-kernel integral at a point, scipy quad with the singularity flagged."""
    val, err = quad(lambda y: np.log(np.abs(np.sin((x + y) / 2.0))) * h(y),
                    -np.pi, np.pi, points=[-x], limit=200)
    assert err < 1e-7
    return val / np.pi


def j_oracle(h, x):
    """PV cotangent kernel cot((x+y)/2): Cauchy part 2/(y+x) plus smooth rest."""
    pv, err1 = quad(lambda y: 2.0 * h(y), -np.pi, np.pi, weight="cauchy", wvar=-x)
    rest, err2 = quad(lambda y: _cot_remainder(x + y) * h(y), -np.pi, np.pi, limit=200)
    assert err1 < 1e-6 and err2 < 1e-8
    return (pv + rest) / (2.0 * np.pi)


def g_oracle(h, x):
    """PV cotangent kernel cot((y-x)/2): Cauchy part 2/(y-x) plus smooth rest."""
    pv, err1 = quad(lambda y: 2.0 * h(y), -np.pi, np.pi, weight="cauchy", wvar=x)
    rest, err2 = quad(lambda y: _cot_remainder(y - x) * h(y), -np.pi, np.pi, limit=200)
    assert err1 < 1e-6 and err2 < 1e-8
    return (pv + rest) / (2.0 * np.pi)


class TestKernelOracles:
    """The spectral actions equal the integral operators they stand for."""

    XS = [0.3, -0.7, 1.0]

    def test_b_on_constant(self):
        for x in self.XS:
            assert b_oracle(lambda y: 1.0, x) == pytest.approx(B_CONSTANT_VALUE, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_b_on_single_modes(self, n):
        for x in self.XS:
            got_c = b_oracle(lambda y: np.cos(n * y), x)
            assert got_c == pytest.approx(-np.cos(n * x) / n, abs=1e-8)
            got_s = b_oracle(lambda y: np.sin(n * y), x)
            assert got_s == pytest.approx(np.sin(n * x) / n, abs=1e-8)

    def test_b_on_combination(self):
        h = lambda y: 1.0 + np.cos(y) - 2.0 * np.sin(3.0 * y)
        for x in self.XS:
            expected = B_CONSTANT_VALUE - np.cos(x) - (2.0 / 3.0) * np.sin(3.0 * x)
            assert b_oracle(h, x) == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_j_swaps_cos_and_sin(self, n):
        for x in self.XS:
            assert j_oracle(lambda y: np.cos(n * y), x) == pytest.approx(np.sin(n * x), abs=1e-7)
            assert j_oracle(lambda y: np.sin(n * y), x) == pytest.approx(np.cos(n * x), abs=1e-7)

    def test_j_kills_the_mean(self):
        for x in self.XS:
            assert j_oracle(lambda y: 1.0, x) == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2])
    def test_g_is_the_hilbert_action(self, n):
        for x in self.XS:
            assert g_oracle(lambda y: np.cos(n * y), x) == pytest.approx(-np.sin(n * x), abs=1e-7)
            assert g_oracle(lambda y: np.sin(n * y), x) == pytest.approx(np.cos(n * x), abs=1e-7)


class TestEpsilonSequence:
    def test_defaults_and_values(self):
        assert EPS.eps0 == 0.05 and EPS.rho == 0.5
        assert EPS.value(3) == pytest.approx(0.00625, rel=1e-15)
        np.testing.assert_allclose(EPS.values(4), [0.05, 0.025, 0.0125, 0.00625], rtol=1e-15)
        assert not EPS.degenerate

    def test_degenerate_zero_coupling_is_allowed(self):
        z = EpsilonSequence(0.0)
        assert z.degenerate
        assert np.all(z.values(10) == 0.0)

    def test_validation(self):
        for bad in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError):
                EpsilonSequence(eps0=bad)
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                EpsilonSequence(rho=bad)

    def test_underflow_guard(self):
        with pytest.raises(ValueError):
            EpsilonSequence().values(2000)


class TestModeActions:
    def test_A(self, layout16):
        out = apply_A(TrigVector.cosine(layout16, 3))
        np.testing.assert_array_equal(out.coeffs(), TrigVector.cosine(layout16, 3, 10.0).coeffs())
        out = apply_A(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(out.coeffs(), TrigVector.sine(layout16, 2, 5.0).coeffs())

    def test_B(self, layout16):
        one = apply_B(TrigVector.constant(layout16, 1.0))
        np.testing.assert_array_equal(one.coeffs(), TrigVector.constant(layout16, B_CONSTANT_VALUE).coeffs())
        c2 = apply_B(TrigVector.cosine(layout16, 2))
        np.testing.assert_array_equal(c2.coeffs(), TrigVector.cosine(layout16, 2, -0.5).coeffs())
        s2 = apply_B(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(s2.coeffs(), TrigVector.sine(layout16, 2, 0.5).coeffs())

    def test_B_constant_is_minus_two_log_two(self):
        assert B_CONSTANT_VALUE == -2.0 * np.log(2.0)

    def test_one_plus_B_nonnegative_off_the_mean(self, layout16):
        d = np.diag(assemble(layout16, "B").entries)
        shifted = 1.0 + d[1:]  # drop the constant slot
        assert np.min(shifted) == 0.0  # attained at cos x
        assert np.all(shifted >= 0.0)

    def test_J(self, layout16):
        assert np.all(apply_J(TrigVector.constant(layout16, 1.0)).coeffs() == 0.0)
        c2 = apply_J(TrigVector.cosine(layout16, 2))
        np.testing.assert_array_equal(c2.coeffs(), TrigVector.sine(layout16, 2).coeffs())
        s2 = apply_J(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(s2.coeffs(), TrigVector.cosine(layout16, 2).coeffs())

    def test_J_drops_and_logs_top_sine(self, layout16):
        top = TrigVector.sine(layout16, layout16.N + 1, 3.0)
        out = apply_J(top)
        assert np.all(out.coeffs() == 0.0)
        assert out.truncation_loss == pytest.approx(3.0 * np.sqrt(np.pi))

    def test_J_squared_is_identity_off_mean_and_top(self, layout16, rng):
        v = TrigVector.from_coeffs(layout16, rng.standard_normal(layout16.dim))
        vv = apply_J(apply_J(v))
        expected = v.coeffs().copy()
        expected[0] = 0.0
        expected[-1] = 0.0
        np.testing.assert_array_equal(vv.coeffs(), expected)

    def test_G(self, layout16):
        c2 = apply_G(TrigVector.cosine(layout16, 2))
        np.testing.assert_array_equal(c2.coeffs(), TrigVector.sine(layout16, 2, -1.0).coeffs())
        s2 = apply_G(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(s2.coeffs(), TrigVector.cosine(layout16, 2).coeffs())

    def test_K_block_action(self, layout16):
        out = apply_K(TrigVector.constant(layout16, 1.0), EPS)
        np.testing.assert_array_equal(out.coeffs(), TrigVector.sine(layout16, 1, 0.05).coeffs())
        out = apply_K(TrigVector.sine(layout16, 1), EPS)
        np.testing.assert_array_equal(out.coeffs(), TrigVector.constant(layout16, -0.05).coeffs())
        out = apply_K(TrigVector.cosine(layout16, 3), EPS)
        np.testing.assert_array_equal(out.coeffs(), TrigVector.sine(layout16, 4, EPS.value(3)).coeffs())

    def test_K_squared_is_minus_eps_squared_blockwise(self, layout16):
        for n in (0, 2, 7):
            kk = apply_K(apply_K(TrigVector.cosine(layout16, n), EPS), EPS)
            np.testing.assert_allclose(kk.coeffs(),
                                       TrigVector.cosine(layout16, n, -EPS.value(n) ** 2).coeffs(),
                                       rtol=1e-15)

    def test_Q(self, layout16):
        assert np.all(apply_Q(TrigVector.constant(layout16, 1.0)).coeffs() == 0.0)
        assert np.all(apply_Q(TrigVector.sine(layout16, 1)).coeffs() == 0.0)
        c1 = apply_Q(TrigVector.cosine(layout16, 1))
        np.testing.assert_array_equal(c1.coeffs(), TrigVector.cosine(layout16, 1, -2.0).coeffs())
        s2 = apply_Q(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(s2.coeffs(), TrigVector.sine(layout16, 2, -2.0).coeffs())

    def test_Qkappa_block(self, layout16):
        out = apply_Qkappa(TrigVector.cosine(layout16, 2), 1.25)
        expected = (TrigVector.cosine(layout16, 2, -6.0) + TrigVector.sine(layout16, 2, -2.5)).coeffs()
        np.testing.assert_array_equal(out.coeffs(), expected)
        with pytest.raises(ValueError):
            apply_Qkappa(TrigVector.cosine(layout16, 2), 0.9)

    def test_A_minus_Jdx(self, layout16):
        c2 = apply_A_minus_Jdx(TrigVector.cosine(layout16, 2))
        np.testing.assert_array_equal(c2.coeffs(), TrigVector.cosine(layout16, 2, 7.0).coeffs())
        s2 = apply_A_minus_Jdx(TrigVector.sine(layout16, 2))
        np.testing.assert_array_equal(s2.coeffs(), TrigVector.sine(layout16, 2, 3.0).coeffs())
        diag = np.diag(assemble(layout16, "A_minus_Jdx").entries)
        assert np.min(diag) == 1.0  # uniform coercivity floor


class TestAssembly:
    OPS = ["A", "B", "Q", "A_minus_Jdx", "J", "G", "D", "K", "Qkappa", "reflect"]

    def _apply(self, name, v):
        if name == "A":
            return apply_A(v)
        if name == "B":
            return apply_B(v)
        if name == "Q":
            return apply_Q(v)
        if name == "A_minus_Jdx":
            return apply_A_minus_Jdx(v)
        if name == "J":
            return apply_J(v)
        if name == "G":
            return apply_G(v)
        if name == "K":
            return apply_K(v, EPS)
        if name == "Qkappa":
            return apply_Qkappa(v, 1.25)
        raise AssertionError(name)

    @pytest.mark.parametrize("name", [op for op in OPS if op not in ("D", "reflect")])
    def test_matrix_columns_equal_mode_action(self, name, layout16):
        m = assemble(layout16, name, eps=EPS, kappa=1.25)
        for i in range(layout16.dim):
            e = TrigVector.from_coeffs(layout16, np.eye(layout16.dim)[i])
            np.testing.assert_array_equal(m.entries[:, i], self._apply(name, e).coeffs(),
                                          err_msg=f"{name} column {i}")

    def test_matrix_apply_matches_coefficient_action(self, layout16, rng):
        v = TrigVector.from_coeffs(layout16, rng.standard_normal(layout16.dim))
        for name in ("A", "B", "Q", "K"):
            m = assemble(layout16, name, eps=EPS)
            np.testing.assert_allclose(m.apply(v).coeffs(), self._apply(name, v).coeffs(),
                                       rtol=1e-14, atol=1e-16)

    def test_derivative_of_B_is_J(self, layout16):
        d = assemble(layout16, "D").entries
        b = assemble(layout16, "B").entries
        j = assemble(layout16, "J").entries
        np.testing.assert_allclose(d @ b, j, atol=1e-15)

    def test_J_is_reflected_hilbert(self, layout16):
        r = assemble(layout16, "reflect").entries
        g = assemble(layout16, "G").entries
        j = assemble(layout16, "J").entries
        np.testing.assert_array_equal(r @ g, j)
        np.testing.assert_array_equal(r @ j, g)

    def test_K_norm_is_eps0_and_skew(self, layout16):
        k = assemble(layout16, "K", eps=EPS).entries
        assert np.linalg.norm(k, 2) == EPS.eps0
        np.testing.assert_array_equal(k.T, -k)

    def test_Q_spectrum_nonpositive_with_double_kernel(self, layout16):
        q = np.diag(assemble(layout16, "Q").entries)
        assert np.all(q <= 0.0)
        assert np.count_nonzero(q == 0.0) == 2  # constant and sin x

    def test_unknown_name_and_missing_arguments(self, layout16):
        with pytest.raises(ValueError):
            assemble(layout16, "nosuch")
        with pytest.raises(ValueError):
            assemble(layout16, "K")
        with pytest.raises(ValueError):
            assemble(layout16, "Qkappa")
        with pytest.raises(ValueError):
            assemble(layout16, "Qkappa", kappa=0.5)
        with pytest.raises(ValueError):
            assemble(layout16, "mult")

    def test_operator_matrix_validation(self, layout16):
        with pytest.raises(ValueError):
            OperatorMatrix(layout16, np.zeros((3, 3)))


class TestMultiplication:
    def test_multiplication_by_one_is_identity(self, layout16):
        m = mult_operator(TrigVector.constant(layout16, 1.0))
        np.testing.assert_allclose(m.entries, np.eye(layout16.dim), atol=1e-13)

    def test_first_column_is_the_multiplier(self, layout16):
        g = TrigVector.constant(layout16, 1.0) - TrigVector.sine(layout16, 1)
        m = assemble(layout16, "mult", g=g)
        np.testing.assert_allclose(m.entries[:, 0], g.coeffs(), atol=1e-14)

    def test_self_adjoint_in_l2(self, layout16):
        g = TrigVector.constant(layout16, 1.0) - TrigVector.sine(layout16, 1)
        m = assemble(layout16, "mult", g=g).entries
        w = layout16.l2_weights()
        wm = w[:, None] * m
        np.testing.assert_allclose(wm, wm.T, atol=1e-13)

    def test_matches_pointwise_samples(self, layout16, rng):
        g = TrigVector.constant(layout16, 1.0) - TrigVector.sine(layout16, 1)
        v = TrigVector.from_coeffs(layout16, rng.standard_normal(layout16.dim))
        from nldlab import pointwise_product
        np.testing.assert_allclose(mult_operator(g).apply(v).coeffs(),
                                   pointwise_product(g, v).coeffs(), atol=1e-13)

    def test_l2_norm_approaches_sup_of_multiplier(self):
        # ||g h||_2 <= sup|g| ||h||_2 with near-equality once the layout can
        # concentrate mass near the max of g = 1 - sin x
        lay = BasisLayout(64)
        g = TrigVector.constant(lay, 1.0) - TrigVector.sine(lay, 1)
        nrm = l2_operator_norm(assemble(lay, "mult", g=g))
        assert nrm <= 2.0 + 1e-10
        assert nrm > 1.995

    def test_two_norm_metrics_differ_for_K(self, layout16):
        # raw coefficient 2-norm of K is eps0; the L2(Gamma)-weighted norm sees
        # the 2*pi constant-mode weight and lands at eps0 * sqrt(2)
        k = assemble(layout16, "K", eps=EPS)
        assert np.linalg.norm(k.entries, 2) == pytest.approx(EPS.eps0, abs=1e-15)
        assert l2_operator_norm(k) == pytest.approx(EPS.eps0 * np.sqrt(2.0), rel=1e-12)

import numpy as np
import pytest
import scipy.integrate

from szegodet import (
    LaurentSeries,
    curve_samples,
    dilate_map,
    eval_map,
    laurent_mul,
    make_map,
)
from szegodet.errors import (
    CurveSelfIntersects,
    DerivativeVanishes,
    DilationNotGreaterThanOne,
    MismatchedTruncation,
    NonPositiveCapacity,
    OutsideDomain,
)


def series(lead, coeffs, M):
    return LaurentSeries(lead, np.asarray(coeffs, dtype=complex), M)


class TestMakeMap:
    def test_circle_identity(self, circle):
        assert eval_map(circle, 2.0) == pytest.approx(2.0)

    def test_q_curve_is_simple(self, qcurve):
        assert qcurve.cap == 1.0

    def test_cusp_rejected(self):
        with pytest.raises((CurveSelfIntersects, DerivativeVanishes)):
            make_map(1.0, 0.0, [1.0])

    def test_orientation_flip_rejected(self):
        # z + q/z with q > 1: the image is still an ellipse but traversed
        # backwards, so the data cannot come from a univalent map
        with pytest.raises(CurveSelfIntersects):
            make_map(1.0, 0.0, [1.4])

    def test_genuine_self_intersection_rejected(self):
        with pytest.raises((CurveSelfIntersects, DerivativeVanishes)):
            make_map(1.0, 0.0, [0.0, 0.0, 0.9])

    def test_nonpositive_cap(self):
        with pytest.raises(NonPositiveCapacity):
            make_map(0.0, 0.0, [0.0])
        with pytest.raises(NonPositiveCapacity):
            make_map(-1.0, 0.0, [0.0])

    def test_empty_tail(self):
        with pytest.raises(ValueError):
            make_map(1.0, 0.0, [])


class TestEvalMap:
    def test_q_value_at_theta0(self, qcurve):
        assert eval_map(qcurve, 1.0) == pytest.approx(1.5)

    def test_q_derivative_symbolic(self, qcurve):
        # phi'(z) = 1 - q/z**2 at z = i gives 1.5
        assert eval_map(qcurve, 1j, 1) == pytest.approx(1.5)

    def test_outside_domain(self, qcurve):
        with pytest.raises(OutsideDomain):
            eval_map(qcurve, 0.5)

    def test_bad_order(self, qcurve):
        with pytest.raises(ValueError):
            eval_map(qcurve, 2.0, 4)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_finite_difference(self, wobbly, order):
        # centered difference of the next-lower order at step 1e-5
        h = 1e-5
        for z in [1.7, 1.2 + 0.8j, 2.0j]:
            fd = (eval_map(wobbly, z + h, order - 1) - eval_map(wobbly, z - h, order - 1)) / (2 * h)
            val = eval_map(wobbly, z, order)
            assert abs(fd - val) <= 1e-6 * max(1.0, abs(val))


class TestCurveSamples:
    def test_circle_points_and_weights(self, circle):
        pts, w = curve_samples(circle, 16)
        assert np.allclose(pts, np.exp(2j * np.pi * np.arange(16) / 16))
        assert np.allclose(w, 2 * np.pi / 16)

    def test_weights_positive_and_converged(self, wobbly):
        _, w1 = curve_samples(wobbly, 512)
        _, w2 = curve_samples(wobbly, 1024)
        assert np.all(w1 > 0)
        assert abs(np.sum(w1) - np.sum(w2)) <= 1e-10 * np.sum(w2)

    def test_arc_length_oracle(self, qcurve):
        # adaptive quadrature of |cap phi'(e^{i t})| over one period
        length, _ = scipy.integrate.quad(
            lambda t: abs(eval_map(qcurve, np.exp(1j * t), 1)), 0.0, 2 * np.pi,
            limit=200,
        )
        _, w = curve_samples(qcurve, 1024)
        assert np.sum(w) == pytest.approx(length, abs=1e-9)

    def test_grid_validation(self, circle):
        with pytest.raises(ValueError):
            curve_samples(circle, 15)
        with pytest.raises(ValueError):
            curve_samples(circle, 8)


class TestDilateMap:
    def test_circle_fixed(self, circle):
        d = dilate_map(circle, 2.0)
        assert d.cap == 1.0
        assert np.allclose(d.tail, 0.0)

    def test_q_rule(self, qcurve):
        d = dilate_map(qcurve, 2.0)
        assert d.tail[0] == pytest.approx(0.125)

    def test_tail_to_zero(self, qcurve):
        d = dilate_map(qcurve, 1e6)
        assert np.max(np.abs(d.tail)) <= 1e-12 * np.max(np.abs(qcurve.tail))

    def test_composition(self, wobbly):
        a = dilate_map(dilate_map(wobbly, 1.5), 2.0)
        b = dilate_map(wobbly, 3.0)
        assert abs(a.phi0 - b.phi0) <= 1e-14
        assert np.max(np.abs(a.tail - b.tail)) <= 1e-14

    def test_requires_r_gt_one(self, qcurve):
        with pytest.raises(DilationNotGreaterThanOne):
            dilate_map(qcurve, 1.0)


class TestLaurentMul:
    def test_z_times_z(self):
        z = series(1, [1, 0, 0, 0], 2)
        out = laurent_mul(z, z)
        assert out.lead_degree == 2
        assert out.coeff(2) == 1 and out.coeff(0) == 0

    def test_binomial(self):
        # (z + q/z)**2 = z**2 + 2q + q**2 z**-2
        q = 0.5
        s = series(1, [1, 0, q, 0, 0], 3)
        out = laurent_mul(s, s)
        assert out.coeff(2) == pytest.approx(1)
        assert out.coeff(0) == pytest.approx(2 * q)
        assert out.coeff(-2) == pytest.approx(q * q)
        assert out.coeff(1) == 0 and out.coeff(-1) == 0

    def test_against_double_loop(self):
        rng = np.random.default_rng(42)
        M = 32
        a = series(3, rng.standard_normal(3 + M + 1) + 1j * rng.standard_normal(3 + M + 1), M)
        b = series(2, rng.standard_normal(2 + M + 1) + 1j * rng.standard_normal(2 + M + 1), M)
        out = laurent_mul(a, b)
        for p in range(5, -M - 1, -1):
            acc = 0.0 + 0.0j
            for i in range(3, -M - 1, -1):
                j = p - i
                if -M <= j <= 2:
                    acc += a.coeff(i) * b.coeff(j)
            assert out.coeff(p) == pytest.approx(acc, abs=1e-12)

    def test_commutative_associative(self):
        rng = np.random.default_rng(7)
        M = 8
        mk = lambda lead: series(lead, rng.standard_normal(lead + M + 1), M)
        a, b, c = mk(0), mk(0), mk(0)
        ab = laurent_mul(a, b)
        ba = laurent_mul(b, a)
        assert np.allclose(ab.coeffs, ba.coeffs)
        # lead degrees 0: no truncation interplay, associativity exact
        lhs = laurent_mul(ab, c)
        rhs = laurent_mul(a, laurent_mul(b, c))
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-13)

    def test_mismatched_truncation(self):
        a = series(1, [1, 0, 0], 1)
        b = series(1, [1, 0, 0, 0], 2)
        with pytest.raises(MismatchedTruncation):
            laurent_mul(a, b)

    def test_invariant_length(self):
        with pytest.raises(ValueError):
            series(1, [1, 0], 2)

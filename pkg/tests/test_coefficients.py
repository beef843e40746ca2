import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import zeta

from infchain import coefficients as coef
from infchain.errors import DomainError


def brute_tail(seq, p, n=200_000):
    j = np.arange(p + 1, n + 1)
    return float(np.sum(seq.coef(j)))


class TestFinite:
    def test_total_and_order(self):
        s = coef.finite([0.3, 0.4, 0.0])
        assert_allclose(s.total, 0.7)
        assert s.order == 2
        assert s.finite_support

    def test_tail(self):
        s = coef.finite([0.3, 0.4])
        assert_allclose(s.tail([0, 1, 2, 5]), [0.7, 0.4, 0.0, 0.0])

    def test_coef_beyond_support(self):
        assert coef.finite([0.5]).coef(3) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            coef.finite([0.2, -0.1])

    def test_index_from_one(self):
        with pytest.raises(DomainError):
            coef.finite([0.2]).coef(0)


class TestGeometric:
    def test_tail_closed_form(self):
        s = coef.geometric(0.3, 0.5)
        assert_allclose(s.total, 0.3)
        assert_allclose(s.tail(3), 0.3 * 0.5**4 / 0.5)
        assert_allclose(s.tail(7), brute_tail(s, 7, 200), rtol=1e-12)
        assert s.order is None

    def test_log_tail_no_underflow(self):
        s = coef.geometric(0.3, 0.5)
        assert_allclose(s.log_tail(5000), np.log(0.3) + 5001 * np.log(0.5) - np.log(0.5))

    @pytest.mark.parametrize("gamma", [-0.1, 1.0])
    def test_domain(self, gamma):
        with pytest.raises(DomainError):
            coef.geometric(0.3, gamma)


class TestPolynomial:
    def test_total_zeta(self):
        s = coef.polynomial(0.4, 3.0)
        assert_allclose(s.total, 0.4 * 1.2020569031595942, rtol=1e-12)

    @pytest.mark.parametrize("p", [1, 5, 40])
    def test_tail_inside_bracket(self, p):
        s = coef.polynomial(0.3, 2.5)
        lo, hi = s.tail_bracket(p)
        assert lo <= s.tail(p) <= hi

    def test_tail_matches_summation(self):
        s = coef.polynomial(0.3, 3.0)
        assert_allclose(s.tail(10), 0.3 * zeta(3.0, 11.0), rtol=1e-12)
        # summation stops at 2e5 terms: remainder ~ 0.15 / 2e5**2
        assert_allclose(s.tail(10), brute_tail(s, 10), rtol=1e-8)

    def test_beta_above_one(self):
        with pytest.raises(DomainError):
            coef.polynomial(0.3, 1.0)


class TestAlgebra:
    def test_scaled(self):
        s = coef.geometric(0.3, 0.5).scaled(2.0)
        assert_allclose(s.total, 0.6)

    def test_sum_of_families(self):
        s = coef.geometric(0.1, 0.5) + coef.finite([0.2])
        assert_allclose(s.total, 0.3)
        assert_allclose(s.coef(1), 0.25)
        assert_allclose(s.tail(1), 0.05)
        assert s.order is None

    def test_sum_of_finite_stays_finite(self):
        s = coef.finite([0.1]) + coef.finite([0.2, 0.3])
        assert s.kind == coef.FINITE
        assert_allclose(s.head(2), [0.3, 0.3])

    @pytest.mark.parametrize("s", [coef.finite([0.1, 0.2]), coef.geometric(0.3, 0.5),
                                   coef.polynomial(0.3, 2.0)])
    def test_dict_round_trip(self, s):
        assert coef.from_dict(s.to_dict()) == s

    def test_dict_unknown_key(self):
        with pytest.raises(DomainError):
            coef.from_dict({"kind": "geometric", "c": 0.3, "gamma": 0.5, "beta": 2})


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["finite", "geometric", "polynomial"]), st.floats(0.01, 0.9),
       st.floats(0.05, 0.95), st.integers(0, 200))
def test_tail_nonincreasing_and_starts_at_total(kind, c, shape, p):
    if kind == "finite":
        s = coef.finite(np.full(5, c / 5))
    elif kind == "geometric":
        s = coef.geometric(c, shape)
    else:
        s = coef.polynomial(c, 1.0 + 3 * shape)
    assert_allclose(s.tail(0), s.total)
    assert s.tail(p + 1) <= s.tail(p) + 1e-15
    assert_allclose(s.tail(p) - s.tail(p + 1), s.coef(p + 1), rtol=1e-9, atol=1e-15)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from infchain import orlicz
from infchain.errors import DomainError, NumericError

GRID = [0.5, 1.0, 2.0, 10.0]


def brute_force_sup(phi, q, x, lo=-12.0, hi=12.0, n=1_000_000):
    y = np.exp(np.linspace(lo, hi, n))
    return float(np.max((x * y) ** (q - 1) - phi(y) / y))


class TestEvaluate:
    def test_power_values(self):
        assert orlicz.power(2)(0.0) == 0.0
        assert orlicz.power(3)(2.0) == 8.0

    def test_power_log_at_zero(self):
        assert orlicz.power_log(2, 1)(0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            orlicz.evaluate(orlicz.power(2), -1.0)

    @pytest.mark.parametrize("m", [1.0, 1.5, 2.0, 4.0])
    def test_power_is_multiplicative(self, m):
        phi = orlicz.power(m)
        x, y = np.meshgrid(np.logspace(-3, 3, 13), np.logspace(-3, 3, 13))
        assert_allclose(phi(x * y), phi(x) * phi(y), rtol=1e-12)

    @pytest.mark.parametrize("phi", [orlicz.power(1), orlicz.power(3), orlicz.power_log(2, 1),
                                     orlicz.power_log(1, 0.5)])
    def test_increasing_and_midpoint_convex(self, phi):
        x = np.linspace(0, 20, 401)
        v = phi(x)
        assert np.all(np.diff(v) > 0)
        assert np.all(phi(0.5 * (x[:-1] + x[1:])) <= 0.5 * (v[:-1] + v[1:]) * (1 + 1e-12))

    @pytest.mark.parametrize("bad", [lambda: orlicz.power(0.5), lambda: orlicz.power_log(2, -1)])
    def test_family_domain(self, bad):
        with pytest.raises(DomainError):
            bad()

    @pytest.mark.parametrize("phi", [orlicz.power(2.5), orlicz.power_log(2, 1.5)])
    @pytest.mark.parametrize("v", [1e-6, 0.3, 1.0, 7.0, 1e6])
    def test_inverse(self, phi, v):
        assert_allclose(phi(orlicz.inverse(phi, v)), v, rtol=1e-10)

    def test_dict_round_trip(self):
        for phi in (orlicz.power(3), orlicz.power_log(2, 1)):
            assert orlicz.from_dict(phi.to_dict()) == phi

    def test_dict_unknown_keys(self):
        with pytest.raises(DomainError):
            orlicz.from_dict({"family": "power", "m": 2, "extra": 1})


class TestSubmultiplicative:
    @pytest.mark.parametrize("phi", [orlicz.power(2), orlicz.power_log(2, 1)])
    def test_catalogue_holds(self, phi):
        rep = orlicz.check_submultiplicative(phi, GRID)
        assert rep.holds
        assert not rep.violations

    def test_grid_with_zero(self):
        with pytest.raises(DomainError):
            orlicz.check_submultiplicative(orlicz.power(2), [0.0, 1.0])

    def test_violation_reported(self):
        # x/2 gives xy/2 > xy/4
        phi = orlicz.custom(lambda x: 0.5 * x, "half")
        rep = orlicz.check_submultiplicative(phi, [0.1, 0.2])
        assert not rep.holds
        assert (0.1, 0.2) in [tuple(v[:2]) for v in rep.violations]


class TestPhiTilde:
    def test_power3_at_one(self):
        assert_allclose(orlicz.phi_tilde_q(orlicz.power(3), 2, 1.0), 0.25, rtol=1e-9)

    @pytest.mark.parametrize("phi", [orlicz.power(2), orlicz.power_log(2, 1)])
    def test_zero(self, phi):
        assert orlicz.phi_tilde_q(phi, 2, 0.0) == 0.0

    def test_power4_below_bound(self):
        v = orlicz.phi_tilde_q(orlicz.power(4), 2, 2.0)
        assert v <= 2**1.5

    def test_power4_closed_form(self):
        # sup_y 2y - y^3 at y = sqrt(2/3)
        y = math.sqrt(2 / 3)
        assert_allclose(orlicz.phi_tilde_q(orlicz.power(4), 2, 2.0), 2 * y - y**3, rtol=1e-10)

    @pytest.mark.parametrize("phi,q,x", [(orlicz.power(3), 2, 1.0), (orlicz.power(6), 2, 3.0),
                                         (orlicz.power(4), 1.5, 2.0),
                                         (orlicz.power_log(2, 1), 2, 5.0)])
    def test_against_brute_force(self, phi, q, x):
        assert_allclose(orlicz.phi_tilde_q(phi, q, x), brute_force_sup(phi, q, x), rtol=1e-6)

    def test_query_validation(self):
        with pytest.raises(DomainError):
            orlicz.PhiTildeQuery(orlicz.power(3), 1.0, 1.0)
        with pytest.raises(DomainError):
            orlicz.phi_tilde_q(orlicz.power(3), 2, -1.0)

    def test_unbounded_sup_raises_with_best(self):
        # Phi(y)/y grows slower than y, so the supremum is infinite
        phi = orlicz.custom(lambda y: y**1.5, "y^1.5")
        with pytest.raises(NumericError) as err:
            orlicz.phi_tilde_q(phi, 2, 1.0)
        assert err.value.best > 0

    @pytest.mark.parametrize("phi", [orlicz.power(3), orlicz.power_log(2, 2)])
    def test_nondecreasing(self, phi):
        xs = np.logspace(-3, 2, 40)
        vals = [orlicz.phi_tilde_q(phi, 2, x) for x in xs]
        assert np.all(np.diff(vals) >= -1e-12 * np.abs(vals[1:]))


class TestPhiTildeBound:
    def test_power3(self):
        assert orlicz.phi_tilde_q_bound(orlicz.power(3), 2, 1.0) == 1.0

    def test_power4_zero(self):
        assert orlicz.phi_tilde_q_bound(orlicz.power(4), 2, 0.0) == 0.0

    def test_power_log_b0(self):
        phi = orlicz.power_log_for_decay(2, 0.0)
        assert_allclose(orlicz.phi_tilde_q_bound(phi, 2, 1.0), math.e, rtol=1e-12)

    @pytest.mark.parametrize("m,q", [(2, 2), (1.5, 2), (3, 3)])
    def test_power_needs_m_above_q(self, m, q):
        with pytest.raises(DomainError):
            orlicz.phi_tilde_q_bound(orlicz.power(m), q, 1.0)

    def test_lemma_form_matches_power_closed_form(self):
        x = np.logspace(-3, 3, 25)
        phi = orlicz.power(5)
        assert_allclose(orlicz.phi_tilde_q_bound(phi, 2, x, form="lemma"),
                        orlicz.phi_tilde_q_bound(phi, 2, x), rtol=1e-12)

    @pytest.mark.parametrize("phi,hi", [(orlicz.power(3), 3), (orlicz.power(4), 3),
                                        (orlicz.power(6), 3),
                                        (orlicz.power_log_for_decay(2, 0), 2),
                                        (orlicz.power_log_for_decay(2, 1), 2)])
    def test_numeric_below_bound(self, phi, hi):
        for x in np.logspace(-3, hi, 30):
            assert orlicz.phi_tilde_q(phi, 2, x) <= orlicz.phi_tilde_q_bound(phi, 2, x) * (1 + 1e-9)

    @pytest.mark.parametrize("phi", [orlicz.power(4), orlicz.power_log(2, 1.0),
                                     orlicz.power_log(2, 3.0)])
    @pytest.mark.parametrize("form", ["closed", "lemma"])
    def test_log_form(self, phi, form):
        x = np.logspace(-2, 2, 20)
        with np.errstate(divide="ignore"):
            expected = np.log(orlicz.phi_tilde_q_bound(phi, 2, x, form=form))
        assert_allclose(orlicz.log_phi_tilde_q_bound(phi, 2, x, form=form), expected, rtol=1e-9)


class TestOrliczNorm:
    def test_constant_samples(self):
        assert_allclose(orlicz.estimate_orlicz_norm(np.full(50, 3.0), orlicz.power(2)), 3.0,
                        rtol=1e-9)

    def test_all_zero(self):
        assert orlicz.estimate_orlicz_norm(np.zeros(10), orlicz.power(2)) == 0.0

    def test_empty(self):
        with pytest.raises(DomainError):
            orlicz.estimate_orlicz_norm([], orlicz.power(2))

    @pytest.mark.parametrize("m", [1.0, 2.0, 3.5])
    def test_power_closed_form(self, m):
        x = np.random.default_rng(4).standard_normal(1000)
        expected = np.mean(np.abs(x) ** m) ** (1 / m)
        assert_allclose(orlicz.estimate_orlicz_norm(x, orlicz.power(m)), expected, rtol=1e-9)

    def test_standard_normal_second_moment(self):
        x = np.random.default_rng(7).standard_normal(100_000)
        assert_allclose(orlicz.estimate_orlicz_norm(x, orlicz.power(2)), 1.0, atol=0.01)

    def test_rows_use_euclidean_norm(self):
        x = np.array([[3.0, 4.0], [0.0, 5.0]])
        assert_allclose(orlicz.estimate_orlicz_norm(x, orlicz.power(1)), 5.0, rtol=1e-9)

    def test_power_log_definition(self):
        x = np.random.default_rng(1).exponential(size=500)
        phi = orlicz.power_log(2, 1)
        u = orlicz.estimate_orlicz_norm(x, phi)
        assert_allclose(np.mean(phi(x / u)), 1.0, rtol=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=60),
           st.sampled_from([orlicz.power(2), orlicz.power(3), orlicz.power_log(2, 1)]))
    def test_l1_below_phi_norm(self, xs, phi):
        n1 = orlicz.estimate_orlicz_norm(xs, orlicz.power(1))
        assert n1 <= orlicz.estimate_orlicz_norm(xs, phi) * (1 + 1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.01, 100), min_size=1, max_size=30), st.floats(0.01, 100))
    def test_homogeneous(self, xs, lam):
        phi = orlicz.power_log(2, 1)
        a = orlicz.estimate_orlicz_norm(np.asarray(xs) * lam, phi)
        assert_allclose(a, lam * orlicz.estimate_orlicz_norm(xs, phi), rtol=1e-8)

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats as sps

from infchain import models, samplers, stats
from infchain.errors import DomainError

NORMAL = samplers.Normal()
AR1 = models.ar1(0.5, NORMAL)
IID = models.iid(NORMAL)


def affine_ar1(scale=1.0):
    return models.affine_model(lambda p: np.full(p.shape[0], scale),
                               lambda p: 0.5 * models.lag(p, 1)[:, 0],
                               models.coef.finite([0.0]), models.coef.finite([0.5]), NORMAL,
                               det_lower=scale)


class TestKS:
    def test_quantile_sample(self):
        n = 200
        x = sps.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        d, _ = stats.ks_statistic(x, stats.normal_cdf)
        assert_allclose(d, 0.5 / n, rtol=1e-9)

    def test_single_median(self):
        d, _ = stats.ks_statistic([0.0], stats.normal_cdf)
        assert d == 0.5

    @pytest.mark.parametrize("lam", [0.3, 0.8, 1.0, 1.36, 2.5])
    def test_kolmogorov_series(self, lam):
        assert_allclose(stats.kolmogorov_sf(lam), sps.kstwobign.sf(lam), rtol=1e-10, atol=1e-15)

    def test_matches_scipy_distance(self):
        x = np.random.default_rng(0).normal(size=500)
        assert_allclose(stats.ks_statistic(x, stats.normal_cdf)[0],
                        sps.kstest(x, "norm").statistic, rtol=1e-12)

    def test_uniform_p_values(self):
        gen = np.random.default_rng(1)
        ps = [stats.ks_statistic(gen.random(10_000), lambda u: np.clip(u, 0, 1))[1]
              for _ in range(40)]
        assert np.mean([(0.01 < p < 0.99) for p in ps]) >= 0.9

    def test_empty(self):
        with pytest.raises(DomainError):
            stats.ks_statistic([], stats.normal_cdf)


class TestLongRunVariance:
    def test_iid(self):
        assert_allclose(stats.estimate_long_run_variance(IID, stats.TAC, 100_000, 3), 1.0,
                        rtol=0.05)

    @pytest.mark.parametrize("method", [stats.TAC, stats.BATCH])
    def test_ar1(self, method):
        v = stats.estimate_long_run_variance(AR1, method, 100_000, 12345)
        assert_allclose(v, 4.0, rtol=0.1)

    def test_methods_agree(self):
        a = stats.estimate_long_run_variance(AR1, stats.TAC, 100_000, 12345)
        b = stats.estimate_long_run_variance(AR1, stats.BATCH, 100_000, 12345)
        assert abs(a - b) <= 0.15 * max(a, b)

    @pytest.mark.parametrize("method", [stats.TAC, stats.BATCH])
    def test_shift_invariant(self, method):
        x = np.random.default_rng(2).normal(size=4000)
        assert_allclose(stats.long_run_variance(x + 7.5, method),
                        stats.long_run_variance(x, method), rtol=1e-9)

    def test_taper_formula(self):
        x = np.array([1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, -0.5])
        c = x - x.mean()
        g = [np.sum(c[: 8 - i] * c[i:]) / 8 for i in range(3)]
        expected = g[0] + 2 * (2 / 3 * g[1] + 1 / 3 * g[2])
        assert_allclose(stats.long_run_variance(x, stats.TAC, lag=2), expected, rtol=1e-12)

    def test_batch_formula(self):
        x = np.arange(12.0)
        means = x.reshape(3, 4).mean(axis=1)
        assert_allclose(stats.long_run_variance(x, stats.BATCH, batch_len=4),
                        4 * means.var(ddof=1))

    def test_nonpositive_flagged(self):
        x = np.tile([1.0, -1.0], 50)
        with pytest.warns(UserWarning):
            v = stats.long_run_variance(x, stats.BATCH, batch_len=2)
        assert v <= 0

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            stats.long_run_variance(np.ones(10), "spectral")


class TestSLLN:
    def test_iid_scaling(self):
        rep = stats.slln_diagnostic(IID, 1.5, [100, 1000, 10_000], 400, 4)
        ratios = [v for _, s, v, _ in rep.rows if s == "ratio_to_previous"]
        assert rep.verdict
        assert_allclose(ratios, 10 ** (-1 / 6), atol=0.1)

    def test_zero_model(self):
        rep = stats.slln_diagnostic(models.zero_model(), 1.5, [10, 100], 20, 1)
        assert all(v == 0 for _, s, v, _ in rep.rows if s == "median_abs_scaled_sum")

    def test_ar1_decreasing(self):
        rep = stats.slln_diagnostic(AR1, 1.5, [1000, 10_000, 100_000], 200, 12345)
        assert rep.verdict

    def test_estimated_mean_flagged(self):
        m = models.galton_watson_immigration(samplers.Bernoulli(0.4), samplers.Poisson(1.0))
        mu, prov = stats.stationary_mean(m, 0)
        assert prov == models.CLOSED_FORM and mu == m.mean
        m2 = models.linear_input(lambda t, s: np.tanh(t) + s + 1, 1.0,
                                 models.coef.finite([0.3]), NORMAL)
        mu, prov = stats.stationary_mean(m2, 0, n=20_000)
        assert prov == models.EMPIRICAL

    @pytest.mark.parametrize("q", [1.0, 2.0])
    def test_q_range(self, q):
        with pytest.raises(DomainError):
            stats.slln_diagnostic(IID, q, [10, 100], 10, 0)


class TestCLT:
    def test_iid(self):
        rep = stats.clt_test(IID, 50, 1000, t_grid=(1.0,), seed=3)
        assert rep.verdict
        assert rep.info["sigma2_method"] == models.CLOSED_FORM

    def test_ar1(self):
        rep = stats.clt_test(AR1, 2000, 1000, sigma2=4.0, seed=12345)
        assert rep.verdict
        dists = [v for _, s, v, _ in rep.rows if s == "ks_distance"]
        assert max(dists) <= 0.05

    def test_meta_uniformity(self):
        ps = [stats.clt_test(IID, 8, 500, t_grid=(1.0,), seed=s).rows[1][2] for s in range(200)]
        assert sps.kstest(ps, "uniform").pvalue > 0.01

    def test_needs_reps(self):
        with pytest.raises(DomainError):
            stats.clt_test(IID, 100, 100)

    def test_empty_partial_sum(self):
        with pytest.raises(DomainError):
            stats.clt_test(IID, 10, 500, t_grid=(0.05,))

    def test_degenerate_variance(self):
        with pytest.raises(DomainError):
            stats.clt_test(models.zero_model(), 100, 500)


class TestSIP:
    def test_iid(self):
        rep = stats.sip_lil_diagnostic(IID, 1.0, 100_000, 200, 5)
        assert rep.verdict
        assert "not simulated" in rep.info["note"]

    def test_ar1(self):
        assert stats.sip_lil_diagnostic(AR1, 4.0, 100_000, 200, 6).verdict

    def test_zero_model(self):
        rep = stats.sip_lil_diagnostic(models.zero_model(), None, 1000, 10, 0)
        assert not rep.verdict
        assert rep.rows[0][2] == 0.0

    def test_short_run(self):
        with pytest.raises(DomainError):
            stats.sip_lil_diagnostic(IID, 1.0, 500)


class TestDensity:
    def test_kde_sup_normal(self):
        x = np.random.default_rng(3).normal(size=100_000)
        sup, _ = stats.kde_sup(x)
        assert_allclose(sup, 1 / math.sqrt(2 * math.pi), rtol=0.03)

    def test_kde_sup_two_dim(self):
        x = np.random.default_rng(4).normal(size=(100_000, 2))
        sup, _ = stats.kde_sup(x)
        assert_allclose(sup, 1 / (2 * math.pi), rtol=0.05)

    def test_kde_exact_for_few_points(self):
        sup, _ = stats.kde_sup(np.array([0.0, 10.0]), bandwidth=1.0)
        assert_allclose(sup, 0.5 / math.sqrt(2 * math.pi), rtol=1e-3)

    def test_ar1_marginal(self):
        rep = stats.density_bound_check(affine_ar1(), 1, 100_000, seed=1)
        assert rep.verdict
        assert_allclose(rep.rows[0][2], 1 / math.sqrt(2 * math.pi * 4 / 3), rtol=0.05)
        assert_allclose(rep.rows[1][2], 1 / math.sqrt(2 * math.pi))

    def test_ar1_joint(self):
        rep = stats.density_bound_check(affine_ar1(), 2, 100_000, seed=1)
        assert_allclose(rep.rows[1][2], 1 / (2 * math.pi), rtol=1e-12)
        assert_allclose(rep.rows[1][2], 0.1592, atol=1e-4)
        assert rep.verdict

    def test_rescaling_keeps_verdict(self):
        for delta in (0.15, -0.2):
            a = stats.density_bound_check(affine_ar1(), 1, 50_000, seed=2, delta=delta)
            b = stats.density_bound_check(affine_ar1(3.0), 1, 50_000, seed=2, delta=delta)
            assert a.verdict == b.verdict
            assert_allclose(b.rows[0][2], a.rows[0][2] / 3, rtol=0.02)

    def test_needs_lower_bound(self):
        with pytest.raises(DomainError):
            stats.density_bound_check(AR1)


def test_report_serialisation():
    rep = stats.LimitTheoremReport("CLT", True)
    rep.add("t=1", "ks_p_value", 0.5, "> 0.01")
    assert rep.table() == [("CLT", "t=1", "ks_p_value", 0.5, "> 0.01", "pass")]
    assert rep.to_dict()["rows"] == [["t=1", "ks_p_value", 0.5, "> 0.01"]]

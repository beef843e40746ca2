"""Acceptance criteria.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one
pass/fail line per criterion at the end of the run.  All tolerances,
sample sizes, seeds and runtime limits below are fixed by the acceptance
contract and must not be tuned.
"""

import math
import pathlib
import time

import numpy as np
import pytest

from infchain import bounds, cli, dependence, models, orlicz, samplers, simulate, stats
from infchain import coefficients as coef

SEED = 12345
CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs" / "acceptance"

AR1 = models.ar1(0.5, samplers.Normal())
MU1_AR1 = math.sqrt(2 / math.pi)
# X_0 - X*_0 ~ N(0, 8/3): E|X_0 - X*_0| = sqrt(8/3) sqrt(2/pi)
HALF_NORMAL = 4 / math.sqrt(3 * math.pi)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def brute_force_sup(phi, q, x, n=1_000_000):
    y = np.exp(np.linspace(-12.0, 12.0, n))
    return float(np.max((x * y) ** (q - 1) - phi(y) / y))


@pytest.mark.criterion(1, "coupling gap below the tau bound, AR(1)")
def test_coupling_vs_bound(detail):
    r = list(range(1, 21))
    with Timer() as clock:
        est = dependence.estimate_tau(AR1, r, replications=20_000, seed=SEED)
        rep = dependence.compare_to_bound(est, AR1.coeffs, MU1_AR1)
    scaled = np.array([e.mean_abs_gap / 0.5**e.r for e in est])
    worst = float(np.max(np.abs(scaled - 1.3028)))
    detail(f"scaled gap in [{scaled.min():.4f}, {scaled.max():.4f}], target 1.3028 +- 0.05")
    detail(f"{clock.elapsed:.1f}s")
    # the stated 1.3028 is the constant to within its last printed digit
    assert abs(HALF_NORMAL - 1.3028) < 5e-4
    assert rep.passed
    assert worst <= 0.05
    assert clock.elapsed < 60


@pytest.mark.criterion(2, "Phi~_q oracle and closed-form bound")
def test_phi_tilde_oracle(detail):
    with Timer() as clock:
        value = orlicz.phi_tilde_q(orlicz.power(3), 2, 1.0)
        brute = brute_force_sup(orlicz.power(3), 2, 1.0)
        checked = 0
        grids = [(orlicz.power(m), np.logspace(-3, 3, 50)) for m in (3, 4, 6)]
        # the PowerLog objective overflows double precision beyond x ~ 1e2
        grids += [(orlicz.power_log_for_decay(2, b), np.logspace(-3, 2, 50)) for b in (0, 1)]
        violations = []
        for phi, xs in grids:
            for x in xs:
                num = orlicz.phi_tilde_q(phi, 2, float(x))
                bnd = orlicz.phi_tilde_q_bound(phi, 2, float(x))
                checked += 1
                if num > bnd * (1 + 1e-9):
                    violations.append((phi.label, x, num, bnd))
    detail(f"value {value:.6f}, brute force {brute:.6f}, {checked} grid points")
    detail(f"{clock.elapsed:.1f}s")
    assert abs(value - 0.25) <= 1e-3
    assert abs(brute - 0.25) <= 1e-3
    assert not violations
    assert clock.elapsed < 10


@pytest.mark.criterion(3, "condition (Dp) threshold at exponent 2.5")
def test_condition_dp_threshold(detail):
    with Timer() as clock:
        hi = bounds.check_condition_Dp(orlicz.power(4), 2, coef.polynomial(0.3, 3.0))
        lo = bounds.check_condition_Dp(orlicz.power(4), 2, coef.polynomial(0.3, 2.4))
    detail(f"exponent 3.0: {hi.verdict} (slope {hi.slope:.3f}); "
           f"exponent 2.4: {lo.verdict} (slope {lo.slope:.3f})")
    assert hi.verdict == bounds.CONVERGES
    assert lo.verdict == bounds.DIVERGES
    assert clock.elapsed < 10


@pytest.mark.criterion(4, "CLT and long-run variance, AR(1)")
def test_clt(detail):
    with Timer() as clock:
        rep = stats.clt_test(AR1, 2000, 1000, sigma2=4.0, t_grid=(0.25, 0.5, 1.0), seed=SEED)
        tac = stats.estimate_long_run_variance(AR1, stats.TAC, 100_000, SEED)
        batch = stats.estimate_long_run_variance(AR1, stats.BATCH, 100_000, SEED)
    ps = [v for _, s, v, _ in rep.rows if s == "ks_p_value"]
    detail(f"KS p-values {', '.join(f'{p:.3f}' for p in ps)}; "
           f"LRV tac {tac:.3f}, batch {batch:.3f}")
    detail(f"{clock.elapsed:.1f}s")
    assert len(ps) == 3 and all(p > 0.01 for p in ps)
    assert abs(tac - 4.0) <= 0.4
    assert abs(batch - 4.0) <= 0.4
    assert clock.elapsed < 120


@pytest.mark.criterion(5, "SLLN medians, AR(1), q = 1.5")
def test_slln(detail):
    with Timer() as clock:
        rep = stats.slln_diagnostic(AR1, 1.5, [1000, 10_000, 100_000], 200, SEED)
    med = [v for _, s, v, _ in rep.rows if s == "median_abs_scaled_sum"]
    ratios = [v for _, s, v, _ in rep.rows if s == "ratio_to_previous"]
    detail(f"ratios {', '.join(f'{r:.3f}' for r in ratios)} (theory 0.681)")
    detail(f"{clock.elapsed:.1f}s")
    assert all(b < a for a, b in zip(med, med[1:]))
    assert all(0.45 <= r <= 0.95 for r in ratios)
    assert clock.elapsed < 120


@pytest.mark.criterion(6, "recursive approximation within its bound, LARCH")
def test_approximation_bound(detail):
    phi = orlicz.power(1)
    model = models.larch_inf(1.0, coef.geometric(0.3, 0.5), samplers.Uniform(-1, 1), phi=phi)
    r_list = [5, 10, 20]
    with Timer() as clock:
        # ||X_0||_1 from an independent stationary run
        x = stats.stationary_paths(model, 100_000, 1, SEED + 1)[0]
        x0 = orlicz.estimate_orlicz_norm(x, phi)
        bnd = {r: bounds.approx_error_bound(model, phi, 0.0, r, x0_norm=x0).value
               for r in r_list}
        gaps = simulate.approximation_gap(model, r_list, 10_000, SEED, c=0.0,
                                          eps={r: b / 100 for r, b in bnd.items()})
    detail(", ".join(f"r={g.r}: {g.mean_abs_gap:.3g} <= {bnd[g.r]:.3g}" for g in gaps))
    detail(f"{clock.elapsed:.1f}s")
    assert all(g.mean_abs_gap <= bnd[g.r] for g in gaps)
    assert clock.elapsed < 120


@pytest.mark.criterion(7, "density bound, affine ARCH(1)")
def test_density_bound(detail):
    model = models.arch(0.1, [0.3], samplers.Normal())
    with Timer() as clock:
        rep = stats.density_bound_check(model, 1, 100_000, seed=SEED, delta=0.15)
    sup = rep.rows[0][2]
    limit = (1 / math.sqrt(0.1)) * (1 / math.sqrt(2 * math.pi)) * 1.15
    detail(f"KDE sup {sup:.4f} <= {limit:.4f}")
    detail(f"{clock.elapsed:.1f}s")
    assert abs(limit - 1.451) < 1e-3
    assert rep.verdict and sup <= limit
    assert clock.elapsed < 60


@pytest.mark.criterion(8, "||X||_1 <= ||X||_Phi on random sample sets")
def test_phix_property(detail):
    phis = [orlicz.power(2), orlicz.power(3), orlicz.power_log(2, 1)]
    worst = 0.0
    with Timer() as clock:
        for i in range(20):
            x = cli.phix_samples(SEED, i, 1000)
            n1 = orlicz.estimate_orlicz_norm(x, orlicz.power(1))
            for phi in phis:
                nphi = orlicz.estimate_orlicz_norm(x, phi)
                worst = max(worst, n1 / nphi)
                assert n1 <= nphi * (1 + 1e-9)
    detail(f"largest ratio {worst:.4f} over 60 checks")
    assert clock.elapsed < 5


def _csv_bodies(path):
    return {p.name: p.read_bytes() for p in sorted(path.glob("*.csv"))}


@pytest.mark.criterion(9, "configs 1-8 byte-identical at 1 and 8 threads")
def test_determinism(tmp_path, detail):
    configs = sorted(CONFIGS.glob("*.json"))
    assert len(configs) == 8
    mismatched, failed = [], []
    with Timer() as clock:
        for cfg_path in configs:
            outputs = []
            for threads in (1, 8):
                out = tmp_path / f"{cfg_path.stem}-t{threads}"
                cfg = cli.load_config(str(cfg_path), output=str(out))
                code, _ = cli.run_config(cfg, threads=threads, log=lambda *_: None)
                if code != cli.EXIT_OK:
                    failed.append((cfg_path.stem, threads, code))
                outputs.append(_csv_bodies(out))
            if not outputs[0] or outputs[0] != outputs[1]:
                mismatched.append(cfg_path.stem)
    detail(f"{len(configs)} configs, {clock.elapsed:.1f}s for both thread counts")
    assert not mismatched
    assert not failed
    # twice the summed per-criterion limits
    assert clock.elapsed < 2 * (60 + 10 + 10 + 120 + 120 + 120 + 60 + 5)

"""Finite-sample diagnostics for the limit theorems and the density bound.

Every diagnostic returns a :class:`LimitTheoremReport` whose verdict is a
deterministic function of the recorded statistics and thresholds.  The
thresholds are engineering choices, exposed as keyword arguments.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy import ndimage, special

from . import orlicz, rng
from .errors import DomainError
from .models import CLOSED_FORM, EMPIRICAL
from .simulate import SimulationPlan, choose_truncation, simulate_truncated

KS_TERMS = 100
DEFAULT_EPS = 1e-8
SIGMA2_FLOOR = 1e-12


@dataclass
class LimitTheoremReport:
    """Statistics, thresholds and verdict of one diagnostic.

    ``rows`` holds ``(parameter, statistic, value, threshold)`` tuples; the
    flat table adds the theorem name and the verdict.
    """

    theorem: str
    verdict: bool
    rows: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, parameter, statistic, value, threshold=""):
        self.rows.append((parameter, statistic, value, threshold))

    HEADER = ("theorem", "parameter", "statistic", "value", "threshold", "verdict")

    def table(self):
        v = "pass" if self.verdict else "fail"
        return [(self.theorem, p, s, val, thr, v) for p, s, val, thr in self.rows]

    def to_dict(self):
        return {"theorem": self.theorem, "verdict": self.verdict,
                "rows": [list(r) for r in self.rows], "info": self.info}


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov


def kolmogorov_sf(lam, terms=KS_TERMS):
    """Asymptotic ``P(sqrt(n) D_n > lam)`` from the Kolmogorov series."""
    lam = float(lam)
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        # theta-function form converges fast for small lam
        j = np.arange(1, terms + 1)
        cdf = math.sqrt(2 * math.pi) / lam * np.sum(
            np.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8 * lam**2)))
        return float(min(max(1.0 - cdf, 0.0), 1.0))
    j = np.arange(1, terms + 1)
    sf = 2.0 * np.sum((-1.0) ** (j - 1) * np.exp(-2.0 * j**2 * lam**2))
    return float(min(max(sf, 0.0), 1.0))


def ks_statistic(samples, cdf):
    """One-sample KS distance and asymptotic p-value.

    Parameters
    ----------
    samples : array_like
    cdf : callable
        Vectorised, nondecreasing distribution function.

    Returns
    -------
    (float, float)
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise DomainError("samples must be nonempty")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return d, kolmogorov_sf(math.sqrt(n) * d)


def normal_cdf(x):
    return special.ndtr(x)


# ---------------------------------------------------------------------------
# Stationary paths


def stationary_plan(model, horizon, replications, seed, eps=DEFAULT_EPS):
    """Plan whose truncation and burn-in errors are below ``eps``."""
    choice = choose_truncation(model, orlicz.power(1), eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SimulationPlan(choice.p, max(choice.burn_in, choice.p), horizon, replications,
                              seed)


def stationary_paths(model, horizon, replications, seed, threads=1, eps=DEFAULT_EPS):
    """``(replications, horizon)`` scalar paths from an approximately stationary start."""
    if model.state_dim != 1:
        raise DomainError("limit-theorem diagnostics need scalar states")
    plan = stationary_plan(model, horizon, replications, seed, eps)
    return simulate_truncated(model, plan, threads=threads).scalar()


def stationary_mean(model, seed, n=200_000):
    """``(E X_0, provenance)``: closed form, or the mean of an independent long run."""
    if model.mean is not None:
        return float(model.mean), CLOSED_FORM
    aux = [int(x) for x in np.random.SeedSequence([seed, rng.AUX]).generate_state(1)][0]
    path = stationary_paths(model, n, 1, aux)
    return float(path.mean()), EMPIRICAL


# ---------------------------------------------------------------------------
# Long-run variance

TAC = "tac"
BATCH = "batch"


def long_run_variance(x, method=TAC, lag=None, batch_len=None):
    """Long-run variance of a single path.

    ``method="tac"``: ``g_0 + 2 sum_{i<=L} (1 - i/(L+1)) g_i`` with sample
    autocovariances ``g_i`` and default ``L = ceil(n**(1/3))``.
    ``method="batch"``: ``batch_len`` times the variance of the batch means,
    default ``batch_len = ceil(sqrt(n))``.  Non-positive values are returned
    as they are with a warning.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if method == TAC:
        L = math.ceil(n ** (1.0 / 3.0)) if lag is None else int(lag)
        if not 0 <= L < n:
            raise DomainError("need 0 <= L < n")
        c = x - x.mean()
        g = np.array([np.dot(c[: n - i], c[i:]) / n for i in range(L + 1)])
        w = 1.0 - np.arange(1, L + 1) / (L + 1.0)
        value = float(g[0] + 2.0 * np.dot(w, g[1:]))
    elif method == BATCH:
        b = math.ceil(math.sqrt(n)) if batch_len is None else int(batch_len)
        k = n // b if b > 0 else 0
        if k < 2:
            raise DomainError("need at least two batches")
        means = x[: k * b].reshape(k, b).mean(axis=1)
        value = float(b * means.var(ddof=1))
    else:
        raise DomainError(f"unknown long-run variance method {method!r}")
    if not value > 0:
        warnings.warn(f"non-positive long-run variance estimate {value:g}", stacklevel=2)
    return value


def estimate_long_run_variance(model, method=TAC, n=100_000, seed=0, lag=None, batch_len=None):
    """Simulate a stationary path of length ``n`` and estimate its long-run variance."""
    path = stationary_paths(model, n, 1, seed)[0]
    return long_run_variance(path, method, lag=lag, batch_len=batch_len)


def resolve_sigma2(model, sigma2, seed, n=100_000):
    """``(sigma^2, method)``: given, closed form, or truncated-autocovariance estimate."""
    if sigma2 is not None:
        return float(sigma2), "supplied"
    if model.long_run_variance is not None:
        return float(model.long_run_variance), CLOSED_FORM
    aux = int(np.random.SeedSequence([seed, rng.AUX, 1]).generate_state(1)[0])
    return estimate_long_run_variance(model, TAC, n, aux), "tac"


# ---------------------------------------------------------------------------
# SLLN / CLT / LIL


def slln_diagnostic(model, q, n_grid, reps, seed, mean=None, threads=1):
    """Medians over replications of ``|n**(-1/q) S_n|`` along ``n_grid``.

    Pass iff the medians strictly decrease.  The consecutive ratios are
    recorded as well.
    """
    if not 1 < q < 2:
        raise DomainError("q must lie in (1, 2)")
    grid = sorted(int(n) for n in n_grid)
    if grid[0] < 1:
        raise DomainError("n_grid must hold positive sizes")
    if mean is None:
        mu, prov = stationary_mean(model, seed)
    else:
        mu, prov = float(mean), "supplied"
    x = stationary_paths(model, grid[-1], reps, seed, threads=threads)
    partial = np.cumsum(x - mu, axis=1)
    medians = np.array([np.median(np.abs(partial[:, n - 1])) * n ** (-1.0 / q) for n in grid])
    verdict = bool(np.all(np.diff(medians) < 0))
    rep = LimitTheoremReport(f"SLLN(q={q:g})", verdict,
                             info={"mean": mu, "mean_provenance": prov, "reps": reps})
    for n, med in zip(grid, medians):
        rep.add(f"n={n}", "median_abs_scaled_sum", float(med), "strictly decreasing")
    for n, ratio in zip(grid[1:], medians[1:] / np.where(medians[:-1] > 0, medians[:-1], 1)):
        rep.add(f"n={n}", "ratio_to_previous", float(ratio), "")
    return rep


def clt_test(model, n, reps, sigma2=None, t_grid=(0.25, 0.5, 1.0), seed=0, mean=None,
             p_threshold=0.01, threads=1):
    """KS test of ``n**-0.5 S_[nt] / sqrt(sigma^2 t)`` against N(0, 1) for each ``t``."""
    if reps < 500:
        raise DomainError("the CLT test needs reps >= 500")
    for t in t_grid:
        if not 0 < t <= 1 or math.floor(n * t) < 1:
            raise DomainError(f"t={t} gives an empty partial sum for n={n}")
    s2, method = resolve_sigma2(model, sigma2, seed)
    if not s2 > SIGMA2_FLOOR:
        raise DomainError(f"long-run variance {s2:g} is not positive")
    if mean is None:
        mu, prov = stationary_mean(model, seed)
    else:
        mu, prov = float(mean), "supplied"
    x = stationary_paths(model, n, reps, seed, threads=threads)
    partial = np.cumsum(x - mu, axis=1)
    rep = LimitTheoremReport("CLT", True, info={"sigma2": s2, "sigma2_method": method,
                                                "mean": mu, "mean_provenance": prov})
    for t in t_grid:
        z = partial[:, math.floor(n * t) - 1] / math.sqrt(n * s2 * t)
        d, p = ks_statistic(z, normal_cdf)
        rep.add(f"t={t:g}", "ks_distance", d, "")
        rep.add(f"t={t:g}", "ks_p_value", p, f"> {p_threshold:g}")
        rep.verdict = rep.verdict and p > p_threshold
    return rep


def sip_lil_diagnostic(model, sigma2=None, n=100_000, reps=200, seed=0, band=(0.5, 2.0),
                       quantile=0.9, k_min=16, mean=None, threads=1):
    """Law-of-the-iterated-logarithm band implied by the strong invariance principle.

    ``R = max_k |S_k| / sqrt(2 sigma^2 k ln ln k)`` over dyadic ``k`` in
    ``[k_min, n]`` for each replication; pass iff the ``quantile`` of ``R``
    lies in ``band``.  The Gaussian partner sequence is not constructed.
    """
    if n < 1000:
        raise DomainError("the LIL diagnostic needs n >= 1000")
    s2, method = resolve_sigma2(model, sigma2, seed)
    if mean is None:
        mu, prov = stationary_mean(model, seed)
    else:
        mu, prov = float(mean), "supplied"
    ks = [k_min * 2**i for i in range(int(math.log2(n / k_min)) + 1)]
    if ks[-1] != n:
        ks.append(n)
    rep = LimitTheoremReport("SIP", False, info={
        "sigma2": s2, "sigma2_method": method, "mean": mu, "mean_provenance": prov,
        "note": "diagnostic only: the Gaussian coupling is not simulated"})
    if not s2 > 0:
        rep.add(f"n={n}", f"R_q{quantile:g}", 0.0, f"in [{band[0]:g}, {band[1]:g}]")
        rep.info["note"] += "; sigma^2 <= 0, R set to 0"
        return rep
    x = stationary_paths(model, n, reps, seed, threads=threads)
    partial = np.cumsum(x - mu, axis=1)
    k = np.array(ks)
    scale = np.sqrt(2.0 * s2 * k * np.log(np.log(k)))
    r_stat = np.max(np.abs(partial[:, k - 1]) / scale, axis=1)
    qv = float(np.quantile(r_stat, quantile))
    rep.verdict = bool(band[0] <= qv <= band[1])
    rep.add(f"n={n}", f"R_q{quantile:g}", qv, f"in [{band[0]:g}, {band[1]:g}]")
    rep.add(f"n={n}", "R_median", float(np.median(r_stat)), "")
    return rep


# ---------------------------------------------------------------------------
# Density bound


def _silverman(x):
    n = x.size
    sd = x.std(ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * n ** (-0.2)


def kde_sup(points, bandwidth="silverman", refine=16):
    """Supremum of a Gaussian kernel density estimate in one or two dimensions.

    The estimate is binned on a grid of spacing ``h/8`` (1-d) or ``h/4``
    (2-d), smoothed with a Gaussian filter, and the ``refine`` highest cells
    are re-evaluated exactly.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, dim = pts.shape
    if dim not in (1, 2):
        raise DomainError("KDE sup supports one or two dimensions")
    if bandwidth == "silverman":
        if dim == 1:
            h = np.array([_silverman(pts[:, 0])])
        else:
            h = pts.std(axis=0, ddof=1) * n ** (-1.0 / 6.0)
    else:
        h = np.broadcast_to(np.asarray(bandwidth, dtype=float), (dim,)).copy()
    if not np.all(h > 0):
        raise DomainError("degenerate sample: zero bandwidth")
    step = h / (8.0 if dim == 1 else 4.0)
    lo = pts.min(axis=0) - 4 * h
    hi = pts.max(axis=0) + 4 * h
    bins = [int(np.ceil((hi[i] - lo[i]) / step[i])) + 1 for i in range(dim)]
    edges = [lo[i] + step[i] * np.arange(bins[i] + 1) for i in range(dim)]
    counts, _ = np.histogramdd(pts, bins=edges)
    dens = ndimage.gaussian_filter(counts, sigma=tuple(h / step), mode="constant", truncate=5.0)
    dens /= n * np.prod(step)
    top = np.argsort(dens.ravel())[-refine:]
    best = float(dens.max())
    norm = n * np.prod(h) * (2 * math.pi) ** (dim / 2)
    for flat in top:
        idx = np.unravel_index(flat, dens.shape)
        centre = np.array([edges[i][idx[i]] + step[i] / 2 for i in range(dim)])
        z = (pts - centre) / h
        best = max(best, float(np.exp(-0.5 * np.sum(z * z, axis=1)).sum() / norm))
    return best, h


def density_bound_check(model, n_joint=1, samples=100_000, bandwidth="silverman", seed=0,
                        delta=0.15, threads=1):
    """Compare the KDE sup of ``(X_t, ..., X_{t+n-1})`` with ``det_lower**-n sup f_xi**n``.

    Scalar affine models only; the pairwise joint density uses overlapping
    consecutive pairs of one stationary run.
    """
    if n_joint not in (1, 2):
        raise DomainError("n_joint must be 1 or 2")
    if model.det_lower is None or not model.det_lower > 0:
        raise DomainError("density check needs a positive lower bound on det M")
    f_sup = model.sampler.density_sup()
    if f_sup is None:
        raise DomainError("innovation density sup unavailable in closed form")
    path = stationary_paths(model, samples + n_joint - 1, 1, seed, threads=threads)[0]
    pts = np.stack([path[i: i + samples] for i in range(n_joint)], axis=1)
    sup, h = kde_sup(pts, bandwidth)
    bound = (f_sup / model.det_lower) ** n_joint
    rep = LimitTheoremReport(f"Density(n={n_joint})", bool(sup <= bound * (1 + delta)),
                             info={"bandwidth": h.tolist(), "delta": delta})
    rep.add(f"n={n_joint}", "kde_sup", sup, f"<= {bound * (1 + delta)!r}")
    rep.add(f"n={n_joint}", "bound", bound, "")
    return rep

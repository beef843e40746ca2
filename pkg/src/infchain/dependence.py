"""Coupling estimates of the dependence coefficients ``tau(r)``.

For a coupled pair built by :func:`infchain.simulate.simulate_coupled_pair`
the mean gap ``E|X_r - X*_r|`` bounds ``tau(r)`` from above.  It is this
coupling gap, not ``tau`` itself, that is estimated here and compared with
the closed-form bound.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import bounds, orlicz
from .errors import DomainError
from .simulate import SimulationPlan, choose_truncation, simulate_coupled_pair

Z95 = 1.959963984540054


@dataclass(frozen=True)
class TauEstimate:
    """Mean coupling gap at lag ``r`` with a 95% normal half-width."""

    r: int
    mean_abs_gap: float
    ci_halfwidth: float
    n_reps: int


def default_coupling_plan(model, r_list, replications, seed):
    """Plan whose truncation error is 1% of the bound at the largest lag."""
    r_max = max(r_list)
    target = bounds.tau_bound(model.coeffs, model.mu_1.value, r_max).value / 100.0
    if target <= 0:
        target = math.inf
    choice = choose_truncation(model, orlicz.power(1), target)
    return SimulationPlan(choice.p, max(choice.burn_in, choice.p), r_max, replications, seed)


def estimate_tau(model, r_list, plan=None, replications=None, seed=None, threads=1):
    """Estimate ``E|X_r - X*_r|`` for each ``r`` in ``r_list``.

    Either pass a :class:`SimulationPlan` (its horizon is raised to
    ``max(r_list)`` if needed) or ``replications`` and ``seed``, in which
    case :func:`default_coupling_plan` picks ``p`` and the burn-in.
    """
    r_list = [int(r) for r in r_list]
    if not r_list or min(r_list) < 1:
        raise DomainError("r_list must hold lags >= 1")
    if plan is None:
        if replications is None or seed is None:
            raise DomainError("give a plan or both replications and seed")
        plan = default_coupling_plan(model, r_list, replications, seed)
    horizon = max(plan.horizon, max(r_list))
    x, y = simulate_coupled_pair(model, plan.p, plan.burn_in, horizon, plan.seed,
                                 plan.replications, threads=threads)
    idx = np.array(r_list) - 1
    gaps = np.linalg.norm(x.values[:, idx] - y.values[:, idx], axis=2)
    n = plan.replications
    mean = gaps.mean(axis=0)
    sd = gaps.std(axis=0, ddof=1) if n > 1 else np.zeros(len(r_list))
    half = Z95 * sd / math.sqrt(n)
    return [TauEstimate(r, float(m), float(h), n) for r, m, h in zip(r_list, mean, half)]


@dataclass(frozen=True)
class BoundComparison:
    r: int
    estimate: float
    ci: float
    bound: float
    ratio: float
    verdict: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: list

    @property
    def passed(self):
        return all(row.verdict for row in self.rows)

    def table(self):
        """Rows ``(r, estimate, ci, bound, ratio, verdict)``."""
        return [(c.r, c.estimate, c.ci, c.bound, c.ratio, "pass" if c.verdict else "fail")
                for c in self.rows]

    HEADER = ("r", "estimate", "ci", "bound", "ratio", "verdict")


def compare_to_bound(estimates, coeffs, mu_1, bound_values=None):
    """Per-lag verdict ``estimate - ci <= tau_bound(r)``.

    ``bound_values`` may supply precomputed :class:`~infchain.bounds.TauBound`
    objects; their lags must match the estimates.
    """
    if bound_values is None:
        bound_values = bounds.tau_bounds(coeffs, mu_1, [e.r for e in estimates])
    if [b.r for b in bound_values] != [e.r for e in estimates]:
        raise DomainError("estimates and bounds are on different lag grids")
    rows = []
    for est, b in zip(estimates, bound_values):
        ratio = est.mean_abs_gap / b.value if b.value > 0 else (
            0.0 if est.mean_abs_gap == 0 else math.inf)
        ok = est.mean_abs_gap - est.ci_halfwidth <= b.value
        rows.append(BoundComparison(est.r, est.mean_abs_gap, est.ci_halfwidth, b.value,
                                    ratio, bool(ok)))
    return ComparisonReport(rows)

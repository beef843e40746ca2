"""Closed-form dependence and approximation bounds, and series checks.

The central quantity is the coupling bound

    tau(r) <= 2 mu_1 / (1 - a) * min_{1 <= p <= r} ( a**(r/p) + A(p) / (1 - a) )

where ``A(p) = sum_{j > p} a_j``.  The same infimum controls the error of
the recursive approximation.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special

from . import coefficients as coef
from . import orlicz
from .errors import ContractionError, DomainError, NumericError


@dataclass(frozen=True)
class TauBound:
    """Value of a p-scanned bound at lag ``r`` and the minimising ``p``."""

    r: int
    value: float
    argmin_p: int

    def __float__(self):
        return float(self.value)


def _check_a(a):
    if not a < 1:
        raise ContractionError(f"bound needs a < 1, got a = {a:.6g}")


def _check_r(r):
    if int(r) != r or r < 1:
        raise DomainError(f"lag r must be an integer >= 1, got {r}")
    return int(r)


def _inf_term(a, tails, r):
    """``min_p a**(r/p) + A(p)/(1-a)`` over ``p = 1..r`` given ``tails[p-1] = A(p)``."""
    p = np.arange(1, r + 1, dtype=float)
    with np.errstate(under="ignore"):
        g = a ** (r / p) + tails[:r] / (1.0 - a)
    i = int(np.argmin(g))
    return float(g[i]), i + 1


def inf_term(coeffs, r):
    """``(min, argmin)`` of ``a**(r/p) + A(p)/(1-a)`` over ``1 <= p <= r``."""
    r = _check_r(r)
    a = coeffs.total
    _check_a(a)
    tails = np.atleast_1d(coeffs.tail(np.arange(1, r + 1)))
    return _inf_term(a, tails, r)


def tau_bound(coeffs, mu_1, r):
    """Coupling bound on ``tau(r)``.

    Examples
    --------
    >>> from infchain import coefficients
    >>> round(tau_bound(coefficients.finite([0.5]), 1.0, 2).value, 6)
    1.0
    """
    if not mu_1 >= 0:
        raise DomainError("mu_1 must be nonnegative")
    a = coeffs.total
    _check_a(a)
    g, p = inf_term(coeffs, r)
    return TauBound(int(r), 2.0 * mu_1 / (1.0 - a) * g, p)


def tau_bounds(coeffs, mu_1, r_list):
    """:func:`tau_bound` over a list of lags."""
    return [tau_bound(coeffs, mu_1, r) for r in r_list]


def tau_bound_finite(p, a, mu_1, r):
    """Finite-memory bound ``2 mu_1 a**(r/p) / (1 - a)`` for ``r >= p``."""
    _check_a(a)
    if not (p >= 1 and r >= p):
        raise DomainError(f"finite-memory bound needs r >= p >= 1 (p={p}, r={r})")
    if not (a >= 0 and mu_1 >= 0):
        raise DomainError("a and mu_1 must be nonnegative")
    return 2.0 * mu_1 / (1.0 - a) * a ** (r / p)


# ---------------------------------------------------------------------------
# Rate envelopes

GEOMETRIC = "geometric"
POLYNOMIAL = "polynomial"
CALIBRATION_RANGE = (2, 10_000)


@dataclass(frozen=True)
class RateEnvelope:
    """``C * shape(r)`` dominating the exact bound on the calibration range.

    ``shape(r)`` is ``exp(-sqrt(-ln(a) beta r))`` for geometric decay and
    ``(ln r / r)**(beta - 1)`` for polynomial decay.  ``constant`` is the
    smallest ``C`` that makes the envelope dominate; ``worst_ratio`` is the
    largest envelope/exact ratio over the same range.
    """

    kind: str
    a: float
    beta: float
    coeffs: coef.CoefficientSequence
    mu_1: float
    constant: float
    worst_ratio: float
    r_range: tuple = CALIBRATION_RANGE
    exact: np.ndarray = field(default=None, repr=False)

    def shape(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == GEOMETRIC:
            return np.exp(-np.sqrt(-math.log(self.a) * self.beta * r))
        return (np.log(r) / r) ** (self.beta - 1.0)

    def __call__(self, r):
        out = self.constant * self.shape(r)
        return float(out) if np.ndim(out) == 0 else out

    def p_choice(self, r):
        """The truncation order behind the rate at lag ``r``."""
        if self.kind == GEOMETRIC:
            return max(int(math.floor(math.sqrt(-math.log(self.a) * r / self.beta))), 1)
        # largest p with p ln p (1 - beta) / ln a <= r
        k = (1.0 - self.beta) / math.log(self.a)

        def lhs(p):
            return p * math.log(p) * k

        hi = 2
        while lhs(hi) <= r:
            hi *= 2
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if lhs(mid) <= r:
                lo = mid
            else:
                hi = mid
        return max(lo, 1)


def exact_bound_table(coeffs, mu_1, r_max):
    """Exact :func:`tau_bound` values for ``r = 1..r_max`` (vectorised tails)."""
    a = coeffs.total
    _check_a(a)
    tails = np.atleast_1d(coeffs.tail(np.arange(1, r_max + 1)))
    pref = 2.0 * mu_1 / (1.0 - a)
    return np.array([pref * _inf_term(a, tails, r)[0] for r in range(1, r_max + 1)])


def _envelope(kind, coeffs, a, beta, mu_1, r_range):
    lo, hi = r_range
    exact = exact_bound_table(coeffs, mu_1, hi)[lo - 1:]
    env = RateEnvelope(kind, a, beta, coeffs, mu_1, 1.0, 1.0, r_range)
    shape = env.shape(np.arange(lo, hi + 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(exact > 0, exact / shape, 0.0)
    constant = float(ratio.max())
    if constant == 0:
        return RateEnvelope(kind, a, beta, coeffs, mu_1, 0.0, 1.0, r_range, exact)
    if not np.all(exact > 0):
        raise NumericError("exact bound underflows on the calibration range")
    worst = float(np.max(constant * shape / exact))
    return RateEnvelope(kind, a, beta, coeffs, mu_1, constant, worst, r_range, exact)


def geometric_envelope(beta, c, a=None, mu_1=1.0, r_range=CALIBRATION_RANGE):
    """Rate envelope for ``a_j = c exp(-beta j)``.

    ``a`` defaults to ``sum_j a_j``; a larger value may be given since the
    rate only needs ``a_j <= c exp(-beta j)`` with ``sum a_j <= a``.
    """
    if not beta > 0:
        raise DomainError("geometric rate needs beta > 0")
    coeffs = coef.geometric(c, math.exp(-beta))
    a = coeffs.total if a is None else float(a)
    if not 0 < a < 1 or a < coeffs.total - 1e-12:
        raise DomainError(f"need sum a_j <= a < 1 (sum a_j = {coeffs.total:.6g}, a = {a})")
    return _envelope(GEOMETRIC, coeffs, a, beta, mu_1, r_range)


def polynomial_envelope(beta, c, a=None, mu_1=1.0, r_range=CALIBRATION_RANGE):
    """Rate envelope for ``a_j = c j**(-beta)``, ``beta > 1``."""
    if not beta > 1:
        raise DomainError("polynomial rate needs beta > 1")
    coeffs = coef.polynomial(c, beta)
    a = coeffs.total if a is None else float(a)
    if not 0 < a < 1 or a < coeffs.total - 1e-12:
        raise DomainError(f"need sum a_j <= a < 1 (sum a_j = {coeffs.total:.6g}, a = {a})")
    return _envelope(POLYNOMIAL, coeffs, a, beta, mu_1, r_range)


def tau_rate_geometric(a, beta, c, r, mu_1=1.0):
    """Calibrated geometric-decay envelope evaluated at ``r >= 2``."""
    if r < 2:
        raise DomainError("rate envelopes need r >= 2")
    return geometric_envelope(beta, c, a, mu_1)(r)


def tau_rate_polynomial(a, beta, c, r, mu_1=1.0):
    """Calibrated polynomial-decay envelope evaluated at ``r >= 2``."""
    if r < 2:
        raise DomainError("rate envelopes need r >= 2")
    return polynomial_envelope(beta, c, a, mu_1)(r)


# ---------------------------------------------------------------------------
# Approximation bounds


@dataclass(frozen=True)
class ApproxBound:
    r: int
    value: float
    argmin_p: int
    x0_norm: float
    x0_provenance: str

    def __float__(self):
        return float(self.value)


def moment_bound(coeffs, mu_phi):
    """``mu_Phi / (1 - a)``: bound on the Orlicz norm of every truncation."""
    _check_a(coeffs.total)
    return mu_phi / (1.0 - coeffs.total)


def gap_bound(coeffs, mu_phi, p):
    """``a_{p+1} mu_Phi / (1 - a)**2``: distance between successive truncations."""
    a = coeffs.total
    _check_a(a)
    if int(p) != p or p < 0:
        raise DomainError("p must be an integer >= 0")
    return coeffs.coef(int(p) + 1) * mu_phi / (1.0 - a) ** 2


def p_markov_gap_bound(model, phi, p):
    """:func:`gap_bound` with ``mu_Phi`` from the model."""
    return gap_bound(model.coeffs, model.mu_phi(phi).value, p)


def approx_error_bound(model, phi, c_bar, r, x0_norm=None):
    """Bound on ``||X~_r - X_r||_Phi`` for the recursive approximation.

    ``(||X_0||_Phi + c_bar) / (1 - a) * min_p (a**(r/p) + A(p)/(1-a))``.
    Without ``x0_norm`` the moment bound ``mu_Phi / (1 - a)`` is used and
    the provenance is ``"bound"``.
    """
    if not c_bar >= 0:
        raise DomainError("c_bar must be nonnegative")
    coeffs = model.coeffs
    a = coeffs.total
    _check_a(a)
    if x0_norm is None:
        x0, prov = moment_bound(coeffs, model.mu_phi(phi).value), "bound"
    else:
        x0, prov = float(x0_norm), "supplied"
    g, p = inf_term(coeffs, r)
    return ApproxBound(int(r), (x0 + c_bar) / (1.0 - a) * g, p, x0, prov)


# ---------------------------------------------------------------------------
# Series conditions

CONVERGES = "converges"
DIVERGES = "diverges"
INCONCLUSIVE = "inconclusive"
SLOPE_MARGIN = 0.05
C0_GRID = tuple(10.0 ** np.arange(-3.0, 3.01, 0.5))

POLYNOMIAL_LOG_K = "polynomial_log_k"
STRETCHED_EXPONENTIAL = "stretched_exponential"


@dataclass(frozen=True)
class SeriesReport:
    """Numerical verdict on ``sum_k a_k Phi~_q(arg_k)``.

    The verdict comes from the log-log slope of the terms over the last
    decade of computed indices: ``converges`` when the slope is below
    ``-1 - margin``, ``diverges`` when it is at least ``-1`` and
    ``inconclusive`` in between.  This is a heuristic, not a proof.
    """

    condition: str
    verdict: str
    log_partial_sum: float
    slope: float
    c0: float
    terms: int
    log_terms: np.ndarray = field(repr=False, default=None)
    note: str = ""

    @property
    def partial_sum(self):
        return math.exp(self.log_partial_sum) if self.log_partial_sum < 709 else math.inf


def _log_phi_tilde(phi, q, x):
    try:
        return np.asarray(orlicz.log_phi_tilde_q_bound(phi, q, x), dtype=float), "closed-form bound"
    except DomainError:
        vals = np.array([orlicz.phi_tilde_q(phi, q, float(v)) for v in np.ravel(x)])
        with np.errstate(divide="ignore"):
            return np.log(vals).reshape(np.shape(x)), "numeric supremum"


def _verdict_from_logs(k, log_terms, margin):
    tail = k >= k[-1] / 10.0
    lk, lt = np.log(k[tail]), log_terms[tail]
    finite = np.isfinite(lt)
    if not np.any(finite):
        return CONVERGES, -math.inf
    if np.count_nonzero(finite) < 2:
        return INCONCLUSIVE, math.nan
    slope = float(np.polyfit(lk[finite], lt[finite], 1)[0])
    if slope < -1.0 - margin:
        return CONVERGES, slope
    if slope >= -1.0:
        return DIVERGES, slope
    return INCONCLUSIVE, slope


def _series(condition, phi, q, coeffs, args, k, c0, margin, note=""):
    log_a = np.asarray(coeffs.log_coef(k), dtype=float)
    log_phi, how = _log_phi_tilde(phi, q, args)
    with np.errstate(invalid="ignore"):
        log_terms = np.where(np.isneginf(log_a), -np.inf, log_a + log_phi)
    finite = log_terms[np.isfinite(log_terms)]
    log_sum = float(special.logsumexp(finite)) if finite.size else -math.inf
    if coeffs.finite_support:
        verdict, slope = CONVERGES, -math.inf
        note = note or "finite support: finitely many nonzero terms"
    else:
        verdict, slope = _verdict_from_logs(k, log_terms, margin)
    return SeriesReport(condition, verdict, log_sum, slope, c0, int(k[-1]), log_terms,
                        f"{how}; {note}".strip("; "))


def _dp_args(coeffs, k, c0):
    """Arguments ``-c0 k ln A(k-1)`` (Dp2), switching to ``c0 k`` once the tail vanishes."""
    log_tail = np.asarray(coeffs.log_tail(k - 1), dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(np.isneginf(log_tail), c0 * k, -c0 * k * log_tail)


def _scan_c0(run, c0, c0_grid):
    if not c0_grid:
        return run(c0)
    reports = [run(c) for c in C0_GRID]
    for rep in reports:
        if rep.verdict == CONVERGES:
            return rep
    if all(rep.verdict == DIVERGES for rep in reports):
        return reports[0]
    return next(rep for rep in reports if rep.verdict == INCONCLUSIVE)


def _validate_series(q, c0, terms):
    if not q > 1:
        raise DomainError("q must exceed 1")
    if not c0 > 0:
        raise DomainError("c0 must be positive")
    if terms < 10:
        raise DomainError("need at least 10 terms")


def check_condition_Dp(phi, q, coeffs, c0=1.0, terms=10_000, c0_grid=False,
                       margin=SLOPE_MARGIN):
    """Check the moment/dependence series condition behind the limit theorems.

    With finite support the series is ``sum_k a_k Phi~_q(c0 k)`` and always
    converges.  Otherwise it is ``sum_k a_k Phi~_q(-c0 k ln sum_{j>=k} a_j)``.
    ``c0_grid=True`` scans ``c0`` over ``10**[-3, 3]`` and reports the first
    converging value, since the condition only asks for some ``c0 > 0``.
    """
    _validate_series(q, c0, terms)
    k = np.arange(1, int(terms) + 1, dtype=float)
    if coeffs.finite_support:
        def run(c):
            return _series("Dp1", phi, q, coeffs, c * k, k, c, margin)
    else:
        def run(c):
            return _series("Dp2", phi, q, coeffs, _dp_args(coeffs, k, c), k, c, margin)
    return _scan_c0(run, c0, c0_grid)


def check_condition_specialized(phi, q, decay, coeffs, c0=1.0, b=0.0, terms=10_000,
                                c0_grid=False, margin=SLOPE_MARGIN):
    """Series check with the simplified arguments for standard decay families.

    ``decay="polynomial_log_k"``: argument ``c0 k ln k`` (for ``a_k <= c k**-a``).
    ``decay="stretched_exponential"``: argument ``c0 k**(1+b)`` (for
    ``a_k <= c exp(-a k**b)``).
    """
    _validate_series(q, c0, terms)
    k = np.arange(1, int(terms) + 1, dtype=float)
    if decay == POLYNOMIAL_LOG_K:
        cond, base = "Dp1'", k * np.log(k)
    elif decay == STRETCHED_EXPONENTIAL:
        if not b >= 0:
            raise DomainError("b must be nonnegative")
        cond, base = "Dp1''", k ** (1.0 + b)
    else:
        raise DomainError(f"unknown decay family {decay!r}")
    return _scan_c0(lambda c: _series(cond, phi, q, coeffs, c * base, k, c, margin), c0, c0_grid)

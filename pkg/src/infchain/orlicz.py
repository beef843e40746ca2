"""Orlicz functions, empirical Orlicz norms and the transform ``Phi~_q``.

Two parametric families are catalogued::

    power(m)             Phi(x) = x**m
    power_log(m, mp)     Phi(x) = x**m * (1 + log(1 + x))**mp

Both are submultiplicative, ``Phi(x*y) <= Phi(x)*Phi(y)``, for ``m >= 1`` and
``mp >= 0``.  Arbitrary convex evaluators can be wrapped with :func:`custom`;
closed-form bounds are only available for the catalogued families.

The transform is

    Phi~_q(x) = sup_{y > 0} { (x*y)**(q-1) - Phi(y)/y },   q > 1.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericError

POWER = "power"
POWER_LOG = "power_log"
CUSTOM = "custom"

# Supremum search for Phi~_q, over log(y).
_GRID_POINTS = 4096
_LOG_Y_MIN = math.log(1e-8)
_LOG_Y_MAX = math.log(1e8)
_LOG_Y_CEILING = 700.0
_GOLDEN_TOL = 1e-12
_GOLDEN_MAXITER = 500

_NORM_RTOL = 1e-10


@dataclass(frozen=True)
class OrliczFunction:
    """A convex increasing function on ``[0, inf)`` with ``Phi(0) = 0``.

    Use the factories :func:`power`, :func:`power_log` and :func:`custom`
    rather than the constructor.
    """

    family: str
    m: float = 1.0
    m_prime: float = 0.0
    func: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def label(self):
        if self.family == POWER:
            return f"power(m={self.m:g})"
        if self.family == POWER_LOG:
            return f"power_log(m={self.m:g}, m'={self.m_prime:g})"
        return self.name or "custom"

    def to_dict(self):
        if self.family == CUSTOM:
            return {"family": CUSTOM, "name": self.name}
        out = {"family": self.family, "m": self.m}
        if self.family == POWER_LOG:
            out["m_prime"] = self.m_prime
        return out


def power(m):
    """``Phi(x) = x**m`` with ``m >= 1``."""
    if not m >= 1:
        raise DomainError(f"power family needs m >= 1, got {m}")
    return OrliczFunction(POWER, float(m))


def power_log(m, m_prime):
    """``Phi(x) = x**m (1 + log(1+x))**m_prime`` with ``m >= 1, m_prime >= 0``."""
    if not m >= 1:
        raise DomainError(f"power_log family needs m >= 1, got {m}")
    if not m_prime >= 0:
        raise DomainError(f"power_log family needs m' >= 0, got {m_prime}")
    return OrliczFunction(POWER_LOG, float(m), float(m_prime))


def power_log_for_decay(q, b):
    """The function ``x**q (1 + log(1+x))**((1+b)(q-1))`` matched to a
    stretched-exponential decay ``exp(-a k**b)`` of the coefficients."""
    return power_log(q, (1.0 + b) * (q - 1.0))


def custom(func, name="custom"):
    """Wrap a user evaluator.  ``func`` must be vectorised over numpy arrays."""
    return OrliczFunction(CUSTOM, func=func, name=name)


_FIELDS = {POWER: ("m",), POWER_LOG: ("m", "m_prime")}


def from_dict(spec):
    """Build ``power`` or ``power_log`` from ``{"family": ..., "m": ..., ...}``."""
    spec = dict(spec)
    family = spec.pop("family", None)
    if family not in _FIELDS:
        raise DomainError(f"unknown Orlicz family {family!r}")
    missing = [k for k in _FIELDS[family] if k not in spec]
    extra = sorted(set(spec) - set(_FIELDS[family]))
    if missing or extra:
        raise DomainError(f"{family}: missing {missing}, unknown {extra}")
    if family == POWER:
        return power(spec["m"])
    return power_log(spec["m"], spec["m_prime"])


def _raw(phi, x):
    if phi.family == POWER:
        return x**phi.m
    if phi.family == POWER_LOG:
        return x**phi.m * (1.0 + np.log1p(x)) ** phi.m_prime
    return np.asarray(phi.func(x), dtype=float)


def evaluate(phi, x):
    """Evaluate ``Phi(x)`` for ``x >= 0`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("Orlicz functions are defined on [0, inf)")
    out = _raw(phi, arr)
    return float(out) if np.ndim(out) == 0 else out


def inverse(phi, v):
    """Return ``Phi^{-1}(v)`` for a scalar ``v >= 0``."""
    if v < 0:
        raise DomainError("inverse needs v >= 0")
    if v == 0:
        return 0.0
    if phi.family == POWER:
        return v ** (1.0 / phi.m)
    if phi.family == POWER_LOG:
        # Phi(x) >= x**m, so the root is at most v**(1/m).
        hi = v ** (1.0 / phi.m)
        return brentq(lambda t: _raw(phi, t) - v, 0.0, hi, xtol=1e-300, rtol=1e-15)
    hi = 1.0
    while _raw(phi, hi) < v:
        hi *= 2.0
        if hi > 1e300:
            raise NumericError("could not bracket the inverse of the Orlicz function")
    return brentq(lambda t: float(_raw(phi, t)) - v, 0.0, hi, rtol=1e-15)


@dataclass(frozen=True)
class SubmultiplicativeReport:
    holds: bool
    violations: tuple  # (x, y, Phi(xy), Phi(x)Phi(y)) for each failing pair


def check_submultiplicative(phi, grid, rtol=1e-12):
    """Check ``Phi(x*y) <= Phi(x)*Phi(y)`` on every pair of ``grid``."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise DomainError("grid must be nonempty")
    if np.any(g <= 0):
        raise DomainError("grid entries must be positive")
    x, y = np.meshgrid(g, g, indexing="ij")
    lhs = evaluate(phi, x * y)
    rhs = evaluate(phi, x) * evaluate(phi, y)
    bad = lhs > rhs * (1.0 + rtol)
    violations = tuple(
        (float(a), float(b), float(lv), float(rv))
        for a, b, lv, rv in zip(x[bad], y[bad], lhs[bad], rhs[bad])
    )
    return SubmultiplicativeReport(not violations, violations)


@dataclass(frozen=True)
class PhiTildeQuery:
    """Arguments of ``Phi~_q(x)``; validates ``q > 1`` and ``x >= 0``."""

    phi: OrliczFunction
    q: float
    x: float

    def __post_init__(self):
        if not self.q > 1:
            raise DomainError(f"Phi~_q needs q > 1, got {self.q}")
        if not self.x >= 0:
            raise DomainError(f"Phi~_q needs x >= 0, got {self.x}")


def _slowly_varying_factor(phi, q, y):
    """``L(y) = Phi(y) / y**q`` for the catalogued families."""
    if phi.family == POWER:
        return y ** (phi.m - q)
    return y ** (phi.m - q) * (1.0 + np.log1p(y)) ** phi.m_prime


def _objective(phi, q, x, s):
    """``(x y)^(q-1) - Phi(y)/y`` at ``y = exp(s)``; non-finite values map to -inf."""
    y = np.exp(s)
    with np.errstate(over="ignore", invalid="ignore"):
        if phi.family in (POWER, POWER_LOG):
            val = y ** (q - 1.0) * (x ** (q - 1.0) - _slowly_varying_factor(phi, q, y))
        else:
            val = (x * y) ** (q - 1.0) - _raw(phi, y) / y
    val = np.asarray(val, dtype=float)
    return np.where(np.isfinite(val), val, -np.inf)


def _golden_max(f, lo, hi):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(_GOLDEN_MAXITER):
        if hi - lo <= _GOLDEN_TOL * max(1.0, abs(lo) + abs(hi)):
            s = 0.5 * (lo + hi)
            return s, f(s)
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return None


def phi_tilde_q(phi, q, x):
    """Numerical value of ``Phi~_q(x)``.

    The supremum over ``y`` is located on a logarithmic grid of 4096 points
    spanning ``[1e-8, 1e8]`` (extended upwards while the maximum sits on the
    upper edge) and refined by golden-section search on the bracketing
    cell.  The result is a lower bound on the true supremum; it is clipped
    at 0, the limit of the objective as ``y -> 0`` when ``Phi'(0) = 0``.

    Raises
    ------
    NumericError
        If the maximiser escapes past ``y = exp(700)`` or the refinement does
        not converge.  ``err.best`` holds the best grid value.
    """
    query = PhiTildeQuery(phi, float(q), float(x))
    if query.x == 0.0:
        return 0.0
    q, x = query.q, query.x
    lo, hi = _LOG_Y_MIN, _LOG_Y_MAX
    while True:
        s = np.linspace(lo, hi, _GRID_POINTS)
        vals = _objective(phi, q, x, s)
        i = int(np.argmax(vals))
        best = float(vals[i])
        if i < _GRID_POINTS - 1 and np.isneginf(vals[i + 1]) and best > 0:
            # the objective overflowed right after its largest finite value
            raise NumericError(
                f"objective of Phi~_q({x}) overflows while still increasing", best=best
            )
        if i < _GRID_POINTS - 1:
            break
        if hi >= _LOG_Y_CEILING:
            raise NumericError(
                f"supremum of Phi~_q({x}) not attained below y = exp({_LOG_Y_CEILING})",
                best=best,
            )
        lo, hi = hi - (s[1] - s[0]), min(hi + 50.0, _LOG_Y_CEILING)
    if i == 0:
        return max(best, 0.0)

    def f(t):
        return float(_objective(phi, q, x, t))

    refined = _golden_max(f, float(s[i - 1]), float(s[i + 1]))
    if refined is None:
        raise NumericError("golden-section refinement did not converge", best=best)
    return max(best, refined[1], 0.0)


def _check_bound_family(phi, q):
    if phi.family == POWER:
        if not phi.m > q:
            raise DomainError(
                f"closed-form bound needs m > q for the power family (m={phi.m}, q={q})"
            )
    elif phi.family == POWER_LOG:
        if not math.isclose(phi.m, q, rel_tol=0, abs_tol=1e-12):
            raise DomainError("closed-form bound needs m = q for the power_log family")
    else:
        raise DomainError("closed-form bounds exist only for catalogued families")


def _lemma_inverse(phi, q, z):
    """Generalised inverse ``L^{-1}(z) = inf{y > 0 : L(y) >= z}``."""
    z = np.asarray(z, dtype=float)
    if phi.family == POWER:
        return z ** (1.0 / (phi.m - q))
    # L(y) = (1 + log(1+y))**m' >= 1, with L(0+) = 1
    if phi.m_prime == 0:
        return np.where(z <= 1.0, 0.0, np.inf)
    with np.errstate(over="ignore"):
        return np.where(z <= 1.0, 0.0, np.expm1(z ** (1.0 / phi.m_prime) - 1.0))


def _specialised(phi, q):
    """Return the exponent ``b`` of the closed form, or None if none applies."""
    if phi.family == POWER:
        return "power"
    b = phi.m_prime / (q - 1.0) - 1.0
    return b if b >= 0 else None


def phi_tilde_q_bound(phi, q, x, form="closed"):
    """Upper bound on ``Phi~_q(x)`` from the generalised-inverse lemma.

    ``form="lemma"`` returns ``(x L^{-1}(x^(q-1)))^(q-1)`` where
    ``Phi(x) = x^q L(x)``.  ``form="closed"`` (default) returns the two
    classical closed forms when they apply and the lemma form otherwise:

    * ``power(m)``, ``m > q``: ``x^((m-1)(q-1)/(m-q))``
    * ``power_log(q, (1+b)(q-1))``, ``b >= 0``: ``exp((q-1) x^(1/(1+b))) x^(q-1)``

    Accepts arrays for ``x``.
    """
    PhiTildeQuery(phi, float(q), 0.0)
    _check_bound_family(phi, q)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("Phi~_q needs x >= 0")
    spec = _specialised(phi, q) if form == "closed" else None
    with np.errstate(over="ignore", invalid="ignore"):
        if spec == "power":
            out = xa ** ((phi.m - 1.0) * (q - 1.0) / (phi.m - q))
        elif spec is not None:
            out = np.exp((q - 1.0) * xa ** (1.0 / (1.0 + spec))) * xa ** (q - 1.0)
        elif form in ("closed", "lemma"):
            inv = _lemma_inverse(phi, q, xa ** (q - 1.0))
            out = np.where(xa == 0, 0.0, (xa * inv) ** (q - 1.0))
        else:
            raise DomainError(f"unknown bound form {form!r}")
    return float(out) if np.ndim(out) == 0 else out


def log_phi_tilde_q_bound(phi, q, x, form="closed"):
    """Natural log of :func:`phi_tilde_q_bound`, computed without overflow."""
    _check_bound_family(phi, q)
    xa = np.asarray(x, dtype=float)
    spec = _specialised(phi, q) if form == "closed" else None
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        lx = np.log(xa)
        if spec == "power":
            out = (phi.m - 1.0) * (q - 1.0) / (phi.m - q) * lx
        elif spec is not None:
            out = (q - 1.0) * (xa ** (1.0 / (1.0 + spec)) + lx)
        elif phi.family == POWER:
            out = (q - 1.0) * (lx + np.log(_lemma_inverse(phi, q, xa ** (q - 1.0))))
        else:
            z = xa ** (q - 1.0)
            if phi.m_prime == 0:
                inner = np.where(z <= 1.0, -np.inf, np.inf)
            else:
                t = z ** (1.0 / phi.m_prime) - 1.0
                # log(expm1(t)), stable for large t
                inner = np.where(
                    t <= 0, -np.inf, np.where(t > 30, t, np.log(np.expm1(np.maximum(t, 1e-300))))
                )
            out = (q - 1.0) * (lx + inner)
    return float(out) if np.ndim(out) == 0 else out


def _magnitudes(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise DomainError("samples must be nonempty")
    if arr.ndim <= 1:
        return np.abs(arr.ravel())
    return np.linalg.norm(arr.reshape(arr.shape[0], -1), axis=1)


def estimate_orlicz_norm(samples, phi):
    """Empirical Orlicz norm of ``samples``.

    Returns the ``u > 0`` solving ``mean(Phi(|x_i| / u)) = 1``.  Rows of a
    2-d array are treated as vectors and reduced with the Euclidean norm.
    The root is bracketed by ``max|x| / Phi^{-1}(n)`` and
    ``max|x| / Phi^{-1}(1/n)`` and found by bisection to relative
    tolerance 1e-10.
    """
    mags = _magnitudes(samples)
    if not np.all(np.isfinite(mags)):
        raise DomainError("samples must be finite")
    top = float(mags.max())
    if top == 0.0:
        return 0.0
    n = mags.size
    # Scale out the maximum so Phi is evaluated on [0, 1/u'] only.
    z = mags / top
    lo = 1.0 / inverse(phi, float(n))
    hi = 1.0 / inverse(phi, 1.0 / n)
    if lo == hi:
        return top * lo

    def excess(u):
        return float(np.mean(_raw(phi, z / u))) - 1.0

    while hi - lo > _NORM_RTOL * hi:
        mid = math.sqrt(lo * hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return top * 0.5 * (lo + hi)

"""Lipschitz coefficient sequences ``(a_j)_{j >= 1}`` with closed-form tails.

The tail is ``A(p) = sum_{j > p} a_j`` so that ``A(0)`` is the total
``a = sum_j a_j``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .errors import DomainError

FINITE = "finite"
GEOMETRIC = "geometric"
POLYNOMIAL = "polynomial"
SUM = "sum"


@dataclass(frozen=True)
class CoefficientSequence:
    """Nonnegative sequence ``a_1, a_2, ...``.

    Build with :func:`finite`, :func:`geometric` (``a_j = c * gamma**j``) or
    :func:`polynomial` (``a_j = c * j**-beta``).  Sequences can be scaled
    and added; the result keeps exact tails.
    """

    kind: str
    values: tuple = ()
    c: float = 0.0
    gamma: float = 0.0
    beta: float = 0.0
    terms: tuple = ()

    # -- element access -------------------------------------------------
    def coef(self, j):
        """``a_j`` for integer ``j >= 1`` (scalar or array)."""
        ja = np.asarray(j)
        if np.any(ja < 1):
            raise DomainError("coefficients are indexed from j = 1")
        if self.kind == FINITE:
            vals = np.concatenate([[0.0], np.asarray(self.values, dtype=float), [0.0]])
            out = vals[np.minimum(ja, len(self.values) + 1).astype(np.intp)]
        elif self.kind == GEOMETRIC:
            out = self.c * self.gamma ** ja.astype(float)
        elif self.kind == POLYNOMIAL:
            out = self.c * ja.astype(float) ** (-self.beta)
        else:
            out = sum(w * s.coef(ja) for w, s in self.terms)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def head(self, k):
        """The array ``(a_1, ..., a_k)``."""
        if k <= 0:
            return np.zeros(0)
        return np.atleast_1d(self.coef(np.arange(1, k + 1)))

    @property
    def total(self):
        """``a = sum_j a_j``."""
        return float(self.tail(0))

    @property
    def order(self):
        """Index of the last nonzero coefficient, or None for infinite support."""
        if self.kind == FINITE:
            nz = np.flatnonzero(np.asarray(self.values, dtype=float))
            return int(nz[-1]) + 1 if nz.size else 0
        if self.kind == SUM:
            orders = [s.order for w, s in self.terms if w != 0]
            if any(o is None for o in orders):
                return None
            return max(orders, default=0)
        if self.c == 0:
            return 0
        if self.kind == GEOMETRIC and self.gamma == 0:
            return 0
        return None

    @property
    def finite_support(self):
        return self.order is not None

    # -- tails ----------------------------------------------------------
    def tail(self, p):
        """``A(p) = sum_{j > p} a_j`` for integer ``p >= 0`` (scalar or array)."""
        pa = np.asarray(p)
        if np.any(pa < 0):
            raise DomainError("tail index must be >= 0")
        if self.kind == FINITE:
            vals = np.asarray(self.values, dtype=float)
            rev = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]])
            out = rev[np.minimum(pa, len(vals)).astype(np.intp)]
        elif self.kind == GEOMETRIC:
            if self.gamma == 0:
                out = np.zeros(np.shape(pa))
            else:
                out = self.c * self.gamma ** (pa + 1.0) / (1.0 - self.gamma)
        elif self.kind == POLYNOMIAL:
            out = self.c * special.zeta(self.beta, pa + 1.0)
        else:
            out = sum(w * s.tail(pa) for w, s in self.terms)
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def log_tail(self, p):
        """``log A(p)``; ``-inf`` where the tail vanishes.  No underflow for
        the geometric family."""
        pa = np.asarray(p)
        with np.errstate(divide="ignore"):
            if self.kind == GEOMETRIC and self.c > 0 and self.gamma > 0:
                out = (
                    math.log(self.c)
                    + (pa + 1.0) * math.log(self.gamma)
                    - math.log1p(-self.gamma)
                )
            elif self.kind == SUM:
                parts = [
                    math.log(w) + s.log_tail(pa) for w, s in self.terms if w > 0
                ]
                if not parts:
                    out = np.full(np.shape(pa), -np.inf)
                else:
                    out = special.logsumexp(np.stack(np.broadcast_arrays(*parts)), axis=0)
            else:
                out = np.log(self.tail(pa))
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def log_coef(self, j):
        ja = np.asarray(j, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == GEOMETRIC and self.c > 0 and self.gamma > 0:
                out = math.log(self.c) + ja * math.log(self.gamma)
            elif self.kind == POLYNOMIAL and self.c > 0:
                out = math.log(self.c) - self.beta * np.log(ja)
            elif self.kind == SUM:
                parts = [math.log(w) + s.log_coef(ja) for w, s in self.terms if w > 0]
                if not parts:
                    out = np.full(np.shape(ja), -np.inf)
                else:
                    out = special.logsumexp(np.stack(np.broadcast_arrays(*parts)), axis=0)
            else:
                out = np.log(self.coef(np.asarray(j)))
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def tail_bracket(self, p):
        """Integral bracket ``(lower, upper)`` of ``A(p)``, ``p >= 1``, for the
        polynomial family; exact ``(A(p), A(p))`` otherwise."""
        if self.kind != POLYNOMIAL:
            t = self.tail(p)
            return t, t
        if p < 1:
            raise DomainError("integral bracket needs p >= 1")
        k = self.c / (self.beta - 1.0)
        return k * (p + 1.0) ** (1.0 - self.beta), k * float(p) ** (1.0 - self.beta)

    # -- algebra --------------------------------------------------------
    def scaled(self, w):
        if w < 0:
            raise DomainError("scale factor must be nonnegative")
        if self.kind == FINITE:
            return finite([w * v for v in self.values])
        if self.kind == GEOMETRIC:
            return geometric(w * self.c, self.gamma)
        if self.kind == POLYNOMIAL:
            return polynomial(w * self.c, self.beta)
        return CoefficientSequence(SUM, terms=tuple((w * v, s) for v, s in self.terms))

    def __add__(self, other):
        if self.kind == FINITE and other.kind == FINITE:
            n = max(len(self.values), len(other.values))
            return finite(self.head(n) + other.head(n))
        return CoefficientSequence(SUM, terms=((1.0, self), (1.0, other)))

    def to_dict(self):
        if self.kind == FINITE:
            return {"kind": FINITE, "values": list(self.values)}
        if self.kind == GEOMETRIC:
            return {"kind": GEOMETRIC, "c": self.c, "gamma": self.gamma}
        if self.kind == POLYNOMIAL:
            return {"kind": POLYNOMIAL, "c": self.c, "beta": self.beta}
        return {"kind": SUM, "terms": [[w, s.to_dict()] for w, s in self.terms]}


def finite(values):
    vals = tuple(float(v) for v in np.atleast_1d(values))
    if any(v < 0 or not math.isfinite(v) for v in vals):
        raise DomainError("coefficients must be finite and nonnegative")
    return CoefficientSequence(FINITE, values=vals)


def geometric(c, gamma):
    """``a_j = c * gamma**j``."""
    if not c >= 0:
        raise DomainError("geometric coefficients need c >= 0")
    if not 0 <= gamma < 1:
        raise DomainError("geometric coefficients need 0 <= gamma < 1")
    return CoefficientSequence(GEOMETRIC, c=float(c), gamma=float(gamma))


def polynomial(c, beta):
    """``a_j = c * j**-beta`` with ``beta > 1``."""
    if not c >= 0:
        raise DomainError("polynomial coefficients need c >= 0")
    if not beta > 1:
        raise DomainError("polynomial coefficients need beta > 1")
    return CoefficientSequence(POLYNOMIAL, c=float(c), beta=float(beta))


_FIELDS = {FINITE: ("values",), GEOMETRIC: ("c", "gamma"), POLYNOMIAL: ("c", "beta")}
_BUILDERS = {FINITE: finite, GEOMETRIC: geometric, POLYNOMIAL: polynomial}


def from_dict(spec):
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _FIELDS:
        raise DomainError(f"unknown coefficient kind {kind!r}")
    missing = [k for k in _FIELDS[kind] if k not in spec]
    extra = sorted(set(spec) - set(_FIELDS[kind]))
    if missing or extra:
        raise DomainError(f"{kind} coefficients: missing {missing}, unknown {extra}")
    return _BUILDERS[kind](*(spec[k] for k in _FIELDS[kind]))

"""Innovation samplers.

Each sampler draws ``size`` iid innovations from a ``numpy.random.Generator``
and returns an array of shape ``(size, *shape)``.  Draws are
*stream consistent*: consuming a generator in several calls yields the same
values as one call of the combined size, so a path prefix never depends on
the horizon requested.

Catalogue: :class:`Normal`, :class:`Uniform`, :class:`Bernoulli`,
:class:`Poisson`, :class:`Constant`.  :class:`Joint` stacks independent
scalar components (e.g. the random slope and intercept of an affine map).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special, stats

from .errors import DomainError


class Sampler:
    shape = ()
    integer_valued = False

    def sample(self, rng, size):
        return self.from_uniform(rng.random(size))

    def from_uniform(self, u):
        raise NotImplementedError

    def power_moment(self, m):
        """``E|X|**m`` in closed form, or None when unavailable."""
        return None

    def mean(self):
        return None

    def var(self):
        return None

    def density_sup(self):
        """``sup_x f(x)`` of the density, or None."""
        return None


@dataclass(frozen=True)
class Normal(Sampler):
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("normal scale must be positive")

    def sample(self, rng, size):
        return self.loc + self.scale * rng.standard_normal(size)

    def from_uniform(self, u):
        return self.loc + self.scale * special.ndtri(u)

    def power_moment(self, m):
        if self.loc != 0:
            return None
        return self.scale**m * 2 ** (m / 2) * math.gamma((m + 1) / 2) / math.sqrt(math.pi)

    def mean(self):
        return self.loc

    def var(self):
        return self.scale**2

    def density_sup(self):
        return 1.0 / (self.scale * math.sqrt(2 * math.pi))

    def to_dict(self):
        return {"name": "normal", "loc": self.loc, "scale": self.scale}


@dataclass(frozen=True)
class Uniform(Sampler):
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self):
        if not self.high > self.low:
            raise DomainError("uniform needs high > low")

    def from_uniform(self, u):
        return self.low + (self.high - self.low) * u

    def power_moment(self, m):
        a, b = self.low, self.high
        if a >= 0:
            num = b ** (m + 1) - a ** (m + 1)
        elif b <= 0:
            num = abs(a) ** (m + 1) - abs(b) ** (m + 1)
        else:
            num = abs(a) ** (m + 1) + b ** (m + 1)
        return num / ((m + 1) * (b - a))

    def mean(self):
        return 0.5 * (self.low + self.high)

    def var(self):
        return (self.high - self.low) ** 2 / 12.0

    def density_sup(self):
        return 1.0 / (self.high - self.low)

    def to_dict(self):
        return {"name": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class Bernoulli(Sampler):
    p: float = 0.5
    integer_valued = True

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise DomainError("bernoulli needs 0 <= p <= 1")

    def from_uniform(self, u):
        return (np.asarray(u) < self.p).astype(float)

    def power_moment(self, m):
        return self.p

    def mean(self):
        return self.p

    def var(self):
        return self.p * (1 - self.p)

    def to_dict(self):
        return {"name": "bernoulli", "p": self.p}


@dataclass(frozen=True)
class Poisson(Sampler):
    lam: float = 1.0
    integer_valued = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError("poisson needs lam >= 0")

    def from_uniform(self, u):
        if self.lam == 0:
            return np.zeros(np.shape(u))
        return stats.poisson.ppf(u, self.lam)

    def power_moment(self, m):
        if self.lam == 0:
            return 0.0
        # exact series, truncated far in the tail
        k = np.arange(0, int(self.lam + 40 * math.sqrt(self.lam) + 60))
        return float(np.sum(k.astype(float) ** m * stats.poisson.pmf(k, self.lam)))

    def mean(self):
        return self.lam

    def var(self):
        return self.lam

    def to_dict(self):
        return {"name": "poisson", "lam": self.lam}


@dataclass(frozen=True)
class Constant(Sampler):
    value: float = 0.0

    @property
    def integer_valued(self):
        return float(self.value).is_integer()

    def sample(self, rng, size):
        # consume the stream anyway so that mixtures stay aligned
        rng.random(size)
        return np.full(size, float(self.value))

    def from_uniform(self, u):
        return np.full(np.shape(u), float(self.value))

    def power_moment(self, m):
        return abs(self.value) ** m

    def mean(self):
        return float(self.value)

    def var(self):
        return 0.0

    def to_dict(self):
        return {"name": "constant", "value": self.value}


@dataclass(frozen=True)
class Joint(Sampler):
    """Independent scalar components stacked along the last axis."""

    components: tuple

    @property
    def shape(self):
        return (len(self.components),)

    def sample(self, rng, size):
        u = rng.random((size, len(self.components)))
        return np.stack([c.from_uniform(u[:, i]) for i, c in enumerate(self.components)], axis=1)

    def to_dict(self):
        return {"name": "joint", "components": [c.to_dict() for c in self.components]}


@dataclass(frozen=True)
class Vector(Sampler):
    """``dim`` iid copies of a scalar sampler, for states in ``R^d``."""

    component: Sampler
    dim: int

    @property
    def shape(self):
        return (self.dim,)

    def sample(self, rng, size):
        u = rng.random((size, self.dim))
        return self.component.from_uniform(u)

    def density_sup(self):
        s = self.component.density_sup()
        return None if s is None else s**self.dim

    def to_dict(self):
        return {"name": "vector", "component": self.component.to_dict(), "dim": self.dim}


_CATALOGUE = {
    "normal": Normal,
    "uniform": Uniform,
    "bernoulli": Bernoulli,
    "poisson": Poisson,
    "constant": Constant,
}


def from_dict(spec):
    """Build a catalogued sampler from ``{"name": ..., **params}``."""
    spec = dict(spec)
    name = spec.pop("name", None)
    if name not in _CATALOGUE:
        raise DomainError(f"unknown sampler {name!r}; choose from {sorted(_CATALOGUE)}")
    try:
        return _CATALOGUE[name](**spec)
    except TypeError as exc:
        raise DomainError(f"bad parameters for sampler {name!r}: {exc}") from None

"""Simulation of chains with infinite memory.

* :func:`simulate_truncated` -- the ``p``-Markov truncation started at zero
  ``burn_in`` steps before time 1.
* :func:`recursive_approximation` -- ``X~_n = F(X~_{n-1}, ..., X~_1, c, c, ...; xi_n)``.
* :func:`simulate_coupled_pair` -- two truncated paths with independent
  innovations up to time 0 and shared innovations afterwards.

Random streams are keyed by ``(seed, stream id, replication)``; see
:mod:`infchain.rng`.  Replications are processed in fixed chunks so the
thread count never changes any number.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import rng
from .errors import CapacityError, DomainError, NumericError

MAX_VALUES = 10**9
CHUNK = 256
TIME_BLOCK = 1024
MAX_CONSTANT_TAIL = 4096
TAIL_RTOL = 1e-15


@dataclass(frozen=True)
class SimulationPlan:
    """Truncation order, burn-in, horizon, replication count and seed."""

    p: int
    burn_in: int
    horizon: int
    replications: int = 1
    seed: int = 0
    max_values: int = MAX_VALUES

    def __post_init__(self):
        for name, low in (("p", 1), ("burn_in", 0), ("horizon", 1), ("replications", 1)):
            value = getattr(self, name)
            if int(value) != value or value < low:
                raise DomainError(f"plan.{name} must be an integer >= {low}, got {value}")
        if self.horizon * self.replications > self.max_values:
            raise CapacityError(
                f"horizon * replications = {self.horizon * self.replications} "
                f"exceeds the cap of {self.max_values} state values"
            )
        if self.p > self.burn_in:
            warnings.warn(
                f"truncation order p={self.p} exceeds burn_in={self.burn_in}",
                stacklevel=3,
            )


@dataclass(frozen=True)
class SamplePath:
    """Simulated values with shape ``(replications, horizon, state_dim)``."""

    values: np.ndarray
    plan: SimulationPlan
    model: str

    @property
    def horizon(self):
        return self.values.shape[1]

    def replication(self, i):
        """Path ``i`` as an ``(horizon, state_dim)`` array."""
        return self.values[i]

    def scalar(self):
        """``(replications, horizon)`` view for scalar chains."""
        if self.values.shape[2] != 1:
            raise DomainError("scalar() needs a one-dimensional state")
        return self.values[:, :, 0]


def _chunks(n):
    return [range(s, min(s + CHUNK, n)) for s in range(0, n, CHUNK)]


def _parallel(fn, chunks, threads):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


class _Innovations:
    """Block-wise innovation draws for a set of replications."""

    def __init__(self, sampler, seed, stream_id, reps):
        self.sampler = sampler
        self.gens = [rng.stream(seed, stream_id, i) for i in reps]

    def block(self, size):
        return np.stack([self.sampler.sample(g, size) for g in self.gens])


def _step(model, past, xi, t):
    x = model.apply(past, xi)
    if not np.all(np.isfinite(x)):
        raise NumericError(f"non-finite state produced at step t={t}", step=t)
    return x


def _truncated_chunk(model, plan, reps, pre_streams):
    """Run one chunk; returns ``(len(pre_streams), len(reps), horizon, d)``."""
    d, p = model.state_dim, plan.p
    k = len(pre_streams)
    n = len(reps)
    past = np.zeros((k * n, p, d))
    out = np.empty((k * n, plan.horizon, d))

    pre = [_Innovations(model.sampler, plan.seed, s, reps) for s in pre_streams]
    for start in range(0, plan.burn_in, TIME_BLOCK):
        size = min(TIME_BLOCK, plan.burn_in - start)
        xi = np.concatenate([src.block(size) for src in pre])
        for i in range(size):
            t = start + i - plan.burn_in + 1
            x = _step(model, past, xi[:, i], t)
            past = np.concatenate([x[:, None], past[:, :-1]], axis=1)

    post = _Innovations(model.sampler, plan.seed, rng.POST, reps)
    for start in range(0, plan.horizon, TIME_BLOCK):
        size = min(TIME_BLOCK, plan.horizon - start)
        xi = post.block(size)
        xi = np.concatenate([xi] * k)
        for i in range(size):
            x = _step(model, past, xi[:, i], start + i + 1)
            past = np.concatenate([x[:, None], past[:, :-1]], axis=1)
            out[:, start + i] = x
    return out.reshape(k, n, plan.horizon, d)


def _run_truncated(model, plan, pre_streams, threads):
    chunks = _chunks(plan.replications)
    parts = _parallel(lambda c: _truncated_chunk(model, plan, c, pre_streams), chunks, threads)
    return np.concatenate(parts, axis=1)


def simulate_truncated(model, plan, threads=1):
    """Simulate the ``p``-truncated chain started at zero.

    The past is zero at time ``-burn_in``; ``burn_in`` steps are run with
    the pre-zero innovation stream and the next ``horizon`` steps (times
    ``1..horizon``) are recorded.

    Parameters
    ----------
    model : ChainModel
    plan : SimulationPlan
    threads : int
        Worker threads; the output does not depend on it.

    Returns
    -------
    SamplePath
    """
    values = _run_truncated(model, plan, (rng.PRE,), threads)[0]
    return SamplePath(values, plan, model.name)


def simulate_coupled_pair(model, p, burn_in, horizon, seed, replications=1, threads=1):
    """Coupled truncated paths ``(X, X*)``.

    Both start from zero at time ``-burn_in``.  Innovations at times
    ``t <= 0`` are independent between the two paths; from ``t = 1`` on
    they are identical.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = SimulationPlan(p, burn_in, horizon, replications, seed)
    if p > burn_in:
        warnings.warn(f"truncation order p={p} exceeds burn_in={burn_in}", stacklevel=2)
    both = _run_truncated(model, plan, (rng.PRE, rng.PRE_STAR), threads)
    return SamplePath(both[0], plan, model.name), SamplePath(both[1], plan, model.name)


def _tail_array(c, d):
    c = np.asarray(c, dtype=float)
    if c.ndim == 0:
        return np.zeros((0, d)) if c == 0 else None
    if c.ndim == 1:
        c = c[:, None] if d == 1 else c[None, :]
    return c


def _constant_tail_len(model, n):
    """Lags of a constant tail that the recursion can still see."""
    if model.memory is not None:
        return n + model.memory + 1
    # infinite memory: stop once the remaining weight is negligible
    coeffs, extra = model.coeffs, 1
    while extra < MAX_CONSTANT_TAIL and coeffs.tail(extra) > TAIL_RTOL * coeffs.total:
        extra *= 2
    return n + extra


def _recursive_chunk(model, c_tail, c_const, n, seed, reps):
    d = model.state_dim
    m = len(reps)
    post = _Innovations(model.sampler, seed, rng.POST, reps)
    # history holds X~ most recent first, followed by the tail constant
    tail_len = 0 if c_tail is None else len(c_tail)
    if c_const is not None:
        tail_len = _constant_tail_len(model, n)
        tail = np.full((tail_len, d), c_const)
    else:
        tail = c_tail
    hist = np.empty((m, n + tail_len, d))
    hist[:, n:] = tail
    out = np.empty((m, n, d))
    for start in range(0, n, TIME_BLOCK):
        size = min(TIME_BLOCK, n - start)
        xi = post.block(size)
        for i in range(size):
            t = start + i + 1
            x = _step(model, hist[:, n - t + 1:], xi[:, i], t)
            hist[:, n - t] = x
            out[:, t - 1] = x
    return out


def recursive_approximation(model, n, seed, c=0.0, replications=1, threads=1):
    """Recursive approximation ``X~_1, ..., X~_n`` from a constant tail.

    ``X~_1 = F(c, c, ...; xi_1)`` and ``X~_t`` uses the full history
    ``X~_{t-1}, ..., X~_1`` followed by ``c``.  ``c`` is either a scalar
    constant repeated indefinitely (``0`` means a zero tail) or an explicit
    array of tail values, most recent first, zero beyond its length.
    Innovations come from the same stream as the post-zero part of
    :func:`simulate_truncated`, so ``X~_t`` and the truncated chain are
    driven by identical ``xi_t``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    d = model.state_dim
    c_arr = np.asarray(c, dtype=float)
    c_const = float(c_arr) if c_arr.ndim == 0 and c_arr != 0 else None
    c_tail = _tail_array(c, d) if c_const is None else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = SimulationPlan(1, 0, n, replications, seed)
    parts = _parallel(
        lambda r: _recursive_chunk(model, c_tail, c_const, n, seed, r),
        _chunks(replications),
        threads,
    )
    return SamplePath(np.concatenate(parts), plan, model.name)


@dataclass(frozen=True)
class TruncationChoice:
    """Truncation order and burn-in meeting an error target."""

    p: int
    burn_in: int
    tail_bound: float
    burn_in_bound: float


def truncation_for(coeffs, mu_phi, eps, max_p=10**6, max_burn_in=10**7):
    """Smallest ``p`` and burn-in with both error contributions ``<= eps / 2``.

    ``p``: ``mu_phi * A(p) / (1 - a)**2 <= eps / 2``; finite memory of order
    ``p0`` always gives ``p = max(p0, 1)``.
    burn-in: ``mu_phi * a**(burn_in / p) <= eps / 2``.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    a = coeffs.total
    if not a < 1:
        raise DomainError("truncation needs a < 1")
    order = coeffs.order
    if math.isinf(eps):
        return TruncationChoice(max(order or 1, 1), 0, 0.0, 0.0)
    half = eps / 2.0

    def tail_bound(p):
        return mu_phi * coeffs.tail(p) / (1.0 - a) ** 2

    if order is not None:
        p = max(order, 1)
    elif mu_phi == 0:
        p = 1
    else:
        hi = 1
        while tail_bound(hi) > half:
            hi *= 2
            if hi > 2 * max_p:
                raise CapacityError(f"truncation order for eps={eps:g} exceeds {max_p}")
        lo = hi // 2 + 1 if hi > 1 else 1
        while lo < hi:
            mid = (lo + hi) // 2
            if tail_bound(mid) <= half:
                hi = mid
            else:
                lo = mid + 1
        p = lo
        if p > max_p:
            raise CapacityError(f"truncation order for eps={eps:g} exceeds {max_p}")

    if mu_phi <= half:
        burn_in = 0
    elif a == 0:
        burn_in = 1
    else:
        burn_in = max(math.ceil(p * math.log(half / mu_phi) / math.log(a)), 0)
        # guard the ceiling against rounding in the logarithms
        while burn_in > 0 and mu_phi * a ** ((burn_in - 1) / p) <= half:
            burn_in -= 1
        while mu_phi * a ** (burn_in / p) > half:
            burn_in += 1
    if burn_in > max_burn_in:
        raise CapacityError(f"burn-in for eps={eps:g} exceeds {max_burn_in}")
    burn_bound = mu_phi * (a ** (burn_in / p) if burn_in or a else 1.0)
    return TruncationChoice(int(p), int(burn_in), float(tail_bound(p)), float(burn_bound))


def choose_truncation(model, phi, eps, **caps):
    """:func:`truncation_for` with ``mu_Phi`` taken from the model."""
    return truncation_for(model.coeffs, model.mu_phi(phi).value, eps, **caps)


@dataclass(frozen=True)
class ApproximationGap:
    """Mean ``|X~_r - X_r|`` against a fine truncation of the chain."""

    r: int
    mean_abs_gap: float
    ci_halfwidth: float
    n_reps: int
    reference: TruncationChoice


def approximation_gap(model, r_list, replications, seed, c=0.0, eps=None, threads=1):
    """Distance between the recursive approximation and a reference chain.

    Both are driven by the same post-zero innovations.  The reference is the
    truncated chain of :func:`choose_truncation` (``Phi = x``) at error
    ``eps[r]``, a dict keyed by lag or a single float.
    """
    from . import orlicz

    r_list = [int(r) for r in r_list]
    r_max = max(r_list)
    approx = recursive_approximation(model, r_max, seed, c=c, replications=replications,
                                     threads=threads).values
    out = []
    for r in r_list:
        e = eps[r] if isinstance(eps, dict) else eps
        choice = choose_truncation(model, orlicz.power(1), math.inf if e is None else e)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = SimulationPlan(choice.p, max(choice.burn_in, choice.p), r, replications, seed)
        ref = simulate_truncated(model, plan, threads=threads).values
        gaps = np.linalg.norm(approx[:, r - 1] - ref[:, r - 1], axis=1)
        half = 1.959963984540054 * gaps.std(ddof=1) / math.sqrt(replications) \
            if replications > 1 else 0.0
        out.append(ApproximationGap(r, float(gaps.mean()), float(half), replications, choice))
    return out

"""Concrete chains with infinite memory ``X_t = F(X_{t-1}, X_{t-2}, ...; xi_t)``.

A :class:`ChainModel` bundles a vectorised map ``F``, the Lipschitz
coefficients ``(a_j)`` it satisfies for a chosen Orlicz function, and an
innovation sampler.  ``F`` is evaluated on a batch of finite pasts::

    model.apply(past, xi)   # past: (n, k, d), most recent lag first
                            # xi:   (n, *sampler.shape)
                            # ->    (n, d)

Lags beyond ``k`` are zero, which is exactly a point of the space of
finitely non-zero sequences on which ``F`` is defined.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from . import coefficients as coef
from . import orlicz, rng
from .errors import ContractionError, DomainError
from .samplers import Constant, Joint, Sampler

MC_SAMPLES = 100_000
_MC_BATCHES = 20

CLOSED_FORM = "closed-form"
EMPIRICAL = "empirical"
BOUND = "bound"


@dataclass(frozen=True)
class Moment:
    """A moment constant with its provenance (closed-form or empirical)."""

    value: float
    provenance: str
    ci_halfwidth: float = 0.0

    def __float__(self):
        return float(self.value)


def lags(past, k):
    """First ``k`` lags of ``past`` (``(n, k, d)``), zero-padded."""
    n, have, d = past.shape
    if have >= k:
        return past[:, :k]
    out = np.zeros((n, k, d))
    out[:, :have] = past
    return out


def lag(past, j):
    """Lag ``j >= 1`` of ``past`` as an ``(n, d)`` array (zero if absent)."""
    if j <= past.shape[1]:
        return past[:, j - 1]
    return np.zeros((past.shape[0], past.shape[2]))


def _as_state(x, n, d):
    x = np.asarray(x, dtype=float)
    return x.reshape(n, d)


def sampler_norm(sampler, phi, scale=1.0):
    """Closed-form ``||scale * xi||_Phi`` when the sampler allows it, else None."""
    scale = abs(float(scale))
    if scale == 0:
        return 0.0
    if sampler.shape:
        return None
    if isinstance(sampler, Constant):
        return scale * abs(sampler.value) / orlicz.inverse(phi, 1.0)
    if phi.family == orlicz.POWER:
        mom = sampler.power_moment(phi.m)
        if mom is not None:
            return scale * mom ** (1.0 / phi.m)
    return None


def empirical_norm(values, phi):
    """Orlicz norm of ``values`` with a batch-means 95% half-width."""
    est = orlicz.estimate_orlicz_norm(values, phi)
    parts = np.array_split(np.asarray(values), _MC_BATCHES)
    batch = np.array([orlicz.estimate_orlicz_norm(b, phi) for b in parts])
    half = 1.96 * batch.std(ddof=1) / math.sqrt(_MC_BATCHES)
    return Moment(est, EMPIRICAL, float(half))


@dataclass(frozen=True, eq=False)
class ChainModel:
    """A chain with infinite memory and the constants that control it.

    Attributes
    ----------
    name : str
    apply : callable
        Vectorised ``F(past, xi)``; see the module docstring.
    coeffs : CoefficientSequence
        Lipschitz coefficients ``a_j`` valid for ``phi``.
    sampler : Sampler
        Innovation sampler.
    phi : OrliczFunction
        Orlicz function the coefficients were derived for.
    state_dim : int
    zero_scale : float or None
        When not None, ``F(0, 0, ...; xi) = zero_scale * xi`` and moments of
        ``F(0; xi)`` have closed forms.
    mean, long_run_variance, stationary_variance : float or None
        Closed-form stationary quantities when known.
    det_lower : float or None
        Lower bound of ``det M`` for affine models.
    domain : {"real", "nonneg_int", "pos_int"}
        State space used for random pasts in Lipschitz checks.
    """

    name: str
    apply: Callable
    coeffs: coef.CoefficientSequence
    sampler: Sampler
    phi: orlicz.OrliczFunction
    state_dim: int = 1
    zero_scale: Optional[float] = None
    mean: Optional[float] = None
    long_run_variance: Optional[float] = None
    stationary_variance: Optional[float] = None
    det_lower: Optional[float] = None
    domain: str = "real"
    params: dict = field(default_factory=dict)
    provenance: str = CLOSED_FORM
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def a(self):
        return self.coeffs.total

    @property
    def memory(self):
        """Order of a finite memory, or None."""
        return self.coeffs.order

    def zero_output(self, n, seed=0):
        """``n`` draws of ``F(0, 0, ...; xi)``."""
        xi = self.sampler.sample(rng.stream(seed, rng.AUX), n)
        return self.apply(np.zeros((n, 0, self.state_dim)), xi)

    def mu_phi(self, phi=None):
        """``||F(0, 0, ...; xi_0)||_Phi`` as a :class:`Moment`."""
        phi = phi or self.phi
        key = ("mu", phi)
        if key not in self._cache:
            value = None
            if self.zero_scale is not None:
                value = sampler_norm(self.sampler, phi, self.zero_scale)
            if value is not None:
                mom = Moment(value, CLOSED_FORM)
            else:
                mom = empirical_norm(self.zero_output(MC_SAMPLES), phi)
            self._cache[key] = mom
        return self._cache[key]

    @property
    def mu_1(self):
        return self.mu_phi(orlicz.power(1))

    def describe(self):
        return {
            "name": self.name,
            "state_dim": self.state_dim,
            "phi": self.phi.to_dict(),
            "coefficients": self.coeffs.to_dict(),
            "a": self.a,
            "coefficient_provenance": self.provenance,
            **{k: v for k, v in self.params.items() if _jsonable(v)},
        }


def _jsonable(v):
    return isinstance(v, (int, float, str, bool, list, dict)) or v is None


def _require_contraction(coeffs, what):
    a = coeffs.total
    if not a < 1:
        raise ContractionError(f"{what}: sum of Lipschitz coefficients a = {a:.6g} >= 1")


def _noise_norm(sampler, phi):
    value = sampler_norm(sampler, phi)
    if value is not None:
        return Moment(value, CLOSED_FORM)
    draws = sampler.sample(rng.stream(0, rng.AUX, 1), MC_SAMPLES)
    return empirical_norm(draws, phi)


def _finite(coeffs):
    if isinstance(coeffs, coef.CoefficientSequence):
        return coeffs
    return coef.finite(coeffs)


# ---------------------------------------------------------------------------
# Markov models


def nonlinear_ar(R, coeffs, noise, phi=None, name="nonlinear_ar", state_dim=1, **known):
    """``X_t = R(X_{t-1}, ..., X_{t-p}) + xi_t``.

    ``R`` receives the ``(n, p, d)`` array of lags and returns ``(n, d)`` (or
    ``(n,)`` when ``d = 1``).  ``coeffs`` are the declared per-lag Lipschitz
    constants of ``R``; they hold for every Orlicz function since the noise
    cancels in differences.
    """
    coeffs = _finite(coeffs)
    _require_contraction(coeffs, name)
    phi = phi or orlicz.power(2)
    p = max(len(coeffs.values), 1)
    d = state_dim

    def apply(past, xi):
        n = past.shape[0]
        return _as_state(R(lags(past, p)), n, d) + _as_state(xi, n, d)

    r0 = np.asarray(R(np.zeros((1, p, d))), dtype=float)
    zero_scale = 1.0 if d == 1 and np.all(r0 == 0) else None
    return ChainModel(
        name, apply, coeffs, noise, phi, state_dim=d, zero_scale=zero_scale, **known
    )


def linear_ar(weights, noise, phi=None):
    """Linear AR(p), ``X_t = sum_j w_j X_{t-j} + xi_t`` with scalar states."""
    w = np.asarray(weights, dtype=float)

    def R(past):
        return np.sum(past[:, :, 0] * w, axis=1)

    s = float(w.sum())
    known = {}
    if noise.mean() is not None:
        known["mean"] = noise.mean() / (1.0 - s)
    if noise.var() is not None:
        known["long_run_variance"] = noise.var() / (1.0 - s) ** 2
        if len(w) == 1:
            known["stationary_variance"] = noise.var() / (1.0 - w[0] ** 2)
    model = nonlinear_ar(R, np.abs(w), noise, phi=phi, name=f"linear_ar{len(w)}", **known)
    model.params.update(weights=w.tolist(), noise=noise.to_dict())
    return model


def ar1(rho, noise, phi=None):
    """Scalar AR(1), ``X_t = rho X_{t-1} + xi_t``."""
    return linear_ar([rho], noise, phi=phi)


def iid(noise, phi=None):
    """``X_t = xi_t``: no memory at all."""
    known = {"mean": noise.mean(), "long_run_variance": noise.var(),
             "stationary_variance": noise.var()}
    model = nonlinear_ar(lambda past: np.zeros(past.shape[0]), [0.0], noise,
                         phi=phi, name="iid", **known)
    model.params.update(noise=noise.to_dict())
    return model


def zero_model(phi=None):
    """``F = 0``."""
    return iid(Constant(0.0), phi=phi)


def sre_random_affine(A, B, phi=None):
    """Stochastic recurrence ``X_t = A_t X_{t-1} + B_t`` with random ``(A_t, B_t)``.

    The contraction constant ``a_1 = || |A| ||_Phi`` is computed in closed
    form when the sampler of ``A`` allows it and by Monte Carlo otherwise;
    ``model.provenance`` records which.
    """
    phi = phi or orlicz.power(2)
    a_norm = _noise_norm(A, phi)
    coeffs = coef.finite([a_norm.value])
    _require_contraction(coeffs, "sre_random_affine")

    def apply(past, xi):
        x = lag(past, 1)[:, 0]
        return (xi[:, 0] * x + xi[:, 1])[:, None]

    known = {}
    if A.mean() is not None and B.mean() is not None and A.mean() < 1:
        known["mean"] = B.mean() / (1.0 - A.mean())
    model = ChainModel(
        "sre_random_affine",
        apply,
        coeffs,
        Joint((A, B)),
        phi,
        provenance=a_norm.provenance,
        params={"A": A.to_dict(), "B": B.to_dict(), "a1_ci": a_norm.ci_halfwidth},
        **known,
    )
    # F(0; (A, B)) = B
    model._cache[("mu", phi)] = _noise_norm(B, phi)
    if phi != orlicz.power(1):
        model._cache[("mu", orlicz.power(1))] = _noise_norm(B, orlicz.power(1))
    return model


# ---------------------------------------------------------------------------
# Galton-Watson with immigration

STANDARD = "standard"
ABSORBING = "absorbing"


@dataclass(frozen=True)
class GaltonWatsonInnovation(Sampler):
    """Innovation ``(u_0, u_1, u_2, ...)`` of the branching map.

    Stored as ``[u_0, key, u_1, ..., u_W]``.  Offspring counts past ``W`` are
    regenerated from ``key`` on demand, so coupled copies that read the same
    innovation see the same infinite sequence.
    """

    offspring: Sampler
    immigration: Sampler
    width: int = 32

    @property
    def shape(self):
        return (self.width + 2,)

    def sample(self, rng_, size):
        u = rng_.random((size, self.width + 2))
        out = np.empty_like(u)
        out[:, 0] = self.immigration.from_uniform(u[:, 0])
        out[:, 1] = np.floor(u[:, 1] * 2.0**52)
        out[:, 2:] = self.offspring.from_uniform(u[:, 2:])
        return out

    def offspring_sum(self, xi, x):
        """``sum_{i=1}^{x_r} u_i`` for each row ``r``."""
        x = x.astype(np.int64)
        w = self.width
        csum = np.concatenate([np.zeros((xi.shape[0], 1)), np.cumsum(xi[:, 2:], axis=1)], axis=1)
        total = csum[np.arange(xi.shape[0]), np.minimum(x, w)]
        for r in np.flatnonzero(x > w):
            extra = rng.stream(int(xi[r, 1]), 0x6757).random(int(x[r]) - w)
            total[r] += float(np.sum(self.offspring.from_uniform(extra)))
        return total


def galton_watson_immigration(offspring, immigration, variant=STANDARD, phi=None, width=32):
    """Branching process with immigration.

    ``variant="standard"``: ``X_t = u_0 + sum_{i=1}^{X_{t-1}} u_i``.
    ``variant="absorbing"``: the same map except that ``X_t = 0`` whenever
    ``X_{t-1} = 0``, which makes 0 an absorbing state.

    The Lipschitz constant is ``a_1 = ||u_1||_Phi`` (default ``Phi = x``,
    i.e. the mean offspring number).
    """
    if variant not in (STANDARD, ABSORBING):
        raise DomainError(f"unknown variant {variant!r}")
    if not (offspring.integer_valued and immigration.integer_valued):
        raise DomainError("offspring and immigration must be integer valued")
    phi = phi or orlicz.power(1)
    a_norm = _noise_norm(offspring, phi)
    coeffs = coef.finite([a_norm.value])
    _require_contraction(coeffs, "galton_watson_immigration")
    innov = GaltonWatsonInnovation(offspring, immigration, width)

    def apply(past, xi):
        x = np.maximum(np.rint(lag(past, 1)[:, 0]), 0.0)
        out = xi[:, 0] + innov.offspring_sum(xi, x)
        if variant == ABSORBING:
            out = np.where(x > 0, out, 0.0)
        return out[:, None]

    known = {}
    m = offspring.mean()
    if variant == STANDARD:
        lam = immigration.mean()
        known["mean"] = lam / (1.0 - m)
        var_x = (known["mean"] * offspring.var() + immigration.var()) / (1.0 - m**2)
        known["stationary_variance"] = var_x
        known["long_run_variance"] = var_x * (1.0 + m) / (1.0 - m)
    else:
        known.update(mean=0.0, stationary_variance=0.0, long_run_variance=0.0)
    model = ChainModel(
        f"galton_watson_{variant}",
        apply,
        coeffs,
        innov,
        phi,
        zero_scale=None,
        domain="nonneg_int" if variant == STANDARD else "pos_int",
        provenance=a_norm.provenance,
        params={"offspring": offspring.to_dict(), "immigration": immigration.to_dict(),
                "variant": variant},
        **known,
    )
    if variant == STANDARD:
        model._cache[("mu", phi)] = _noise_norm(immigration, phi)
    else:
        model._cache[("mu", phi)] = Moment(0.0, CLOSED_FORM)
    return model


# ---------------------------------------------------------------------------
# Infinite memory


def _memory_weights(seq, k):
    return seq.head(k)


def nl_arch_inf(alpha, lip, noise, alpha_j=None, phi=None):
    """Nonlinear ARCH(inf), ``X_t = xi_t (alpha + sum_j alpha_j(X_{t-j}))``.

    Scalar states.  ``lip`` holds ``Lip(alpha_j)``.  With ``alpha_j=None``
    the model is LARCH(inf): ``alpha_j(x) = c_j x`` where ``c_j`` are the
    entries of ``lip``.  Otherwise ``alpha_j(j, x)`` is a vectorised function
    of the lag index and the lag values, normalised so that
    ``alpha_j(j, 0) = 0`` (fold constants into ``alpha``).

    Coefficients: ``a_j = ||xi_0||_Phi Lip(alpha_j)``.
    """
    phi = phi or orlicz.power(2)
    xi_norm = _noise_norm(noise, phi)
    coeffs = lip.scaled(xi_norm.value)
    _require_contraction(coeffs, "nl_arch_inf")
    larch = alpha_j is None
    if not larch:
        probe = np.zeros(4)
        for j in range(1, 6):
            if np.any(np.asarray(alpha_j(j, probe)) != 0):
                raise DomainError("alpha_j(j, 0) must vanish; fold constants into alpha")

    def apply(past, xi):
        k = past.shape[1]
        level = np.full(past.shape[0], float(alpha))
        if k:
            if larch:
                level = level + np.sum(past[:, :, 0] * lip.head(k), axis=1)
            else:
                for j in range(1, k + 1):
                    level = level + alpha_j(j, past[:, j - 1, 0])
        return (xi * level)[:, None]

    known = {}
    if noise.mean() == 0:
        known["mean"] = 0.0
        if larch and noise.var() is not None:
            sq = _square_sum(lip)
            ex2 = noise.var()
            if sq is not None and ex2 * sq < 1:
                var_x = alpha**2 * ex2 / (1.0 - ex2 * sq)
                known["stationary_variance"] = var_x
                # martingale differences: no autocorrelation
                known["long_run_variance"] = var_x
    return ChainModel(
        "larch_inf" if larch else "nl_arch_inf",
        apply,
        coeffs,
        noise,
        phi,
        zero_scale=float(alpha),
        provenance=xi_norm.provenance,
        params={"alpha": float(alpha), "lip": lip.to_dict(), "noise": noise.to_dict()},
        **known,
    )


def larch_inf(alpha, c, noise, phi=None):
    """LARCH(inf) with nonnegative weights ``c_j``."""
    return nl_arch_inf(alpha, c, noise, alpha_j=None, phi=phi)


def _square_sum(seq):
    if seq.kind == coef.FINITE:
        return float(np.sum(np.square(seq.values)))
    if seq.kind == coef.GEOMETRIC:
        return seq.c**2 * seq.gamma**2 / (1.0 - seq.gamma**2)
    if seq.kind == coef.POLYNOMIAL:
        from scipy.special import zeta

        return seq.c**2 * float(zeta(2 * seq.beta, 1))
    return None


def linear_input(f, L, c, noise, phi=None, f_zero_scale=None):
    """``X_t = f(A_t, xi_t)`` with linear input ``A_t = sum_j c_j X_{t-j}``.

    Scalar states; ``c`` is a coefficient sequence of weights ``c_j >= 0``
    and ``L`` the Orlicz-Lipschitz constant of ``f`` in its first argument.
    ``f_zero_scale`` declares ``f(0, xi) = f_zero_scale * xi`` for closed-form
    moments.  Coefficients: ``a_j = L c_j``.
    """
    phi = phi or orlicz.power(2)
    if not L > 0:
        raise DomainError("L must be positive")
    coeffs = c.scaled(L)
    _require_contraction(coeffs, "linear_input")

    def apply(past, xi):
        k = past.shape[1]
        inp = np.sum(past[:, :, 0] * c.head(k), axis=1) if k else np.zeros(past.shape[0])
        return np.asarray(f(inp, xi), dtype=float)[:, None]

    return ChainModel(
        "linear_input",
        apply,
        coeffs,
        noise,
        phi,
        zero_scale=f_zero_scale,
        params={"L": float(L), "c": c.to_dict(), "noise": noise.to_dict()},
    )


def affine_model(M, f, lip_M, lip_f, noise, phi=None, det_lower=None, state_dim=1,
                 name="affine", **known):
    """Affine model ``X_t = M(past) xi_t + f(past)``.

    ``M(past)`` returns ``(n,)`` for scalar states or ``(n, d, d)``;
    ``f(past)`` returns ``(n,)`` or ``(n, d)``; ``f=None`` means zero.
    Coefficients: ``a_i = ||xi_0||_Phi Lip(M_i) + Lip(f_i)``.
    ``det_lower`` declares ``inf det M > 0``, needed for density checks.
    """
    phi = phi or orlicz.power(2)
    xi_norm = _noise_norm(noise, phi)
    coeffs = lip_M.scaled(xi_norm.value) + lip_f
    _require_contraction(coeffs, "affine_model")
    if det_lower is not None and not det_lower > 0:
        raise DomainError("det_lower must be positive")
    d = state_dim

    def apply(past, xi):
        n = past.shape[0]
        Mv = np.asarray(M(past), dtype=float)
        xi = np.asarray(xi, dtype=float).reshape(n, d)
        if Mv.ndim == 1:
            out = Mv[:, None] * xi
        else:
            out = np.einsum("nij,nj->ni", Mv, xi)
        if f is not None:
            out = out + _as_state(f(past), n, d)
        return out

    zero_scale = None
    if d == 1:
        empty = np.zeros((1, 0, 1))
        m0 = np.asarray(M(empty), dtype=float).ravel()
        f0 = 0.0 if f is None else float(np.asarray(f(empty)).ravel()[0])
        if f0 == 0.0:
            zero_scale = float(abs(m0[0]))
    return ChainModel(
        name,
        apply,
        coeffs,
        noise,
        phi,
        state_dim=d,
        zero_scale=zero_scale,
        det_lower=det_lower,
        provenance=xi_norm.provenance,
        params={"noise": noise.to_dict()},
        **known,
    )


def arch(omega, alphas, noise, phi=None):
    """ARCH(p) as an affine model: ``M = sqrt(omega + sum_i alpha_i x_i^2)``, ``f = 0``.

    ``Lip(M_i) = sqrt(alpha_i)`` and ``inf M = sqrt(omega)``.
    """
    al = np.asarray(alphas, dtype=float)
    if not omega > 0 or np.any(al < 0):
        raise DomainError("ARCH needs omega > 0 and alpha_i >= 0")
    p = len(al)

    def M(past):
        x = lags(past, p)[:, :, 0]
        return np.sqrt(omega + np.sum(al * x * x, axis=1))

    known = {}
    if noise.mean() == 0 and noise.var() is not None:
        known["mean"] = 0.0
        if al.sum() * noise.var() < 1:
            var_x = omega * noise.var() / (1.0 - noise.var() * al.sum())
            known["stationary_variance"] = var_x
            known["long_run_variance"] = var_x
    model = affine_model(M, None, coef.finite(np.sqrt(al)), coef.finite([0.0]), noise,
                         phi=phi, det_lower=math.sqrt(omega), **known)
    model.params.update(omega=float(omega), alphas=al.tolist())
    return _rename(model, f"arch{p}")


def _rename(model, name):
    from dataclasses import replace

    return replace(model, name=name)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class ContractionReport:
    a: float
    mu_1: Moment
    mu_phi: Moment
    contraction_ok: bool
    moment_ok: bool

    @property
    def passed(self):
        return self.contraction_ok and self.moment_ok


def validate_contraction(model, phi=None):
    """Report ``a = sum a_j < 1`` and ``mu_Phi < inf`` as verdicts."""
    phi = phi or model.phi
    mu_phi = model.mu_phi(phi)
    mu_1 = model.mu_1
    return ContractionReport(
        a=model.a,
        mu_1=mu_1,
        mu_phi=mu_phi,
        contraction_ok=bool(model.a < 1),
        moment_ok=bool(math.isfinite(mu_phi.value)),
    )


@dataclass(frozen=True)
class LipschitzReport:
    worst_ratio: float
    ratios: np.ndarray
    tolerance: float
    n_innovations: int

    @property
    def passed(self):
        return bool(self.worst_ratio <= 1.0 + self.tolerance)


def _random_pasts(model, gen, k):
    d = model.state_dim
    if model.domain == "real":
        x = 2.0 * gen.standard_normal((k, d))
        mask = gen.random(k) < 0.5
        mask[gen.integers(k)] = True
        y = x + mask[:, None] * gen.standard_normal((k, d))
    else:
        low = 1 if model.domain == "pos_int" else 0
        x = (low + gen.poisson(3.0, (k, d))).astype(float)
        mask = gen.random(k) < 0.5
        mask[gen.integers(k)] = True
        step = gen.integers(1, 4, (k, d)) * gen.choice([-1, 1], (k, d))
        y = np.maximum(x + mask[:, None] * step, low)
        if np.array_equal(x, y):
            y[0] = x[0] + 1
    return x, y


def empirical_lipschitz_check(model, phi=None, n_pairs=100, past_len=None, seed=0,
                              n_innovations=20_000, tolerance=0.05):
    """Monte Carlo check of ``||F(x; xi) - F(y; xi)||_Phi <= sum_j a_j |x_j - y_j|``.

    Random past pairs differ on a random nonempty subset of lags.  The left
    side is the empirical Orlicz norm over ``n_innovations`` shared
    innovations; the report holds the worst ratio left/right.
    """
    if n_pairs < 100:
        raise DomainError("n_pairs must be at least 100")
    phi = phi or model.phi
    if past_len is None:
        order = model.memory
        past_len = 10 if order is None else order + 2
    past_len = max(int(past_len), 1)
    a = model.coeffs.head(past_len)
    ratios = np.empty(n_pairs)
    for i in range(n_pairs):
        gen = rng.stream(seed, rng.LIPSCHITZ, i)
        x, y = _random_pasts(model, gen, past_len)
        xi = model.sampler.sample(gen, n_innovations)
        fx = model.apply(np.broadcast_to(x, (n_innovations,) + x.shape), xi)
        fy = model.apply(np.broadcast_to(y, (n_innovations,) + y.shape), xi)
        lhs = orlicz.estimate_orlicz_norm(fx - fy, phi)
        rhs = float(np.sum(a * np.linalg.norm(x - y, axis=1)))
        if rhs == 0:
            ratios[i] = 0.0 if lhs == 0 else np.inf
        else:
            ratios[i] = lhs / rhs
    return LipschitzReport(float(ratios.max()), ratios, tolerance, n_innovations)


def stationary_norm(model, phi):
    """Closed-form ``||X_0||_Phi`` for ``Phi = x**2`` when mean and variance are known."""
    if phi != orlicz.power(2) or model.mean is None or model.stationary_variance is None:
        return None
    return Moment(math.sqrt(model.stationary_variance + model.mean**2), CLOSED_FORM)

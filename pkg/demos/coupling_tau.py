"""Coupling gaps against the closed-form tau bound.

Run with ``python3 demos/coupling_tau.py``.
"""

import math

import numpy as np

from infchain import bounds, dependence, models, samplers
from infchain import coefficients as coef


def show(model, r_list, reps=5000):
    est = dependence.estimate_tau(model, r_list, replications=reps, seed=12345)
    rep = dependence.compare_to_bound(est, model.coeffs, model.mu_1.value)
    print(model.name)
    print("  " + " ".join(f"{h:>12}" for h in rep.HEADER))
    for row in rep.table():
        print("  " + " ".join(f"{v:>12.4g}" if isinstance(v, float) else f"{v!s:>12}"
                              for v in row))


def main():
    show(models.ar1(0.5, samplers.Normal()), [1, 2, 5, 10, 20])
    print(f"  E|X_0 - X*_0| = {4 / math.sqrt(3 * math.pi):.4f}")
    larch = models.larch_inf(1.0, coef.geometric(0.3, 0.5), samplers.Uniform(-1, 1))
    show(larch, [1, 2, 5, 10, 20])

    env = bounds.polynomial_envelope(3.0, 0.3)
    r = np.array([10, 100, 1000, 10_000])
    print("polynomial envelope C (ln r / r)^2 with C =", f"{env.constant:.4g}")
    for ri, e, x in zip(r, env(r), env.exact[r - 2]):
        print(f"  r={ri:>6}  envelope={e:.4g}  exact={x:.4g}")


if __name__ == "__main__":
    main()

"""Contraction constants of the shipped models and a short path of each.

Run with ``python3 demos/model_zoo.py``.
"""

import numpy as np

from infchain import coefficients as coef
from infchain import models, samplers
from infchain.simulate import SimulationPlan, simulate_truncated


def zoo():
    normal = samplers.Normal()
    return [
        models.ar1(0.5, normal),
        models.nonlinear_ar(
            lambda p: 0.3 * np.tanh(p[:, 0, 0]) + 0.4 * np.sin(p[:, 1, 0]), [0.3, 0.4], normal,
            name="tanh-sin AR(2)"),
        models.sre_random_affine(samplers.Uniform(0, 0.8), samplers.Constant(1.0)),
        models.galton_watson_immigration(samplers.Bernoulli(0.4), samplers.Poisson(1.0)),
        models.larch_inf(1.0, coef.geometric(0.3, 0.5), samplers.Uniform(-1, 1)),
        models.linear_input(lambda t, s: np.tanh(t) + s, 1.0, coef.polynomial(0.4, 3.0), normal,
                            f_zero_scale=1.0),
        models.arch(0.1, [0.3], normal),
    ]


def main():
    for m in zoo():
        rep = models.validate_contraction(m)
        lip = models.empirical_lipschitz_check(m, n_pairs=100, seed=1, n_innovations=5000)
        plan = SimulationPlan(m.memory or 12, 60, 8, 1, 7)
        path = simulate_truncated(m, plan).scalar()[0]
        print(f"{m.name:>34}  a={rep.a:.4f}  mu_Phi={rep.mu_phi.value:.4f} "
              f"({rep.mu_phi.provenance})  lipschitz ratio={lip.worst_ratio:.3f}")
        print(" " * 36 + " ".join(f"{v:7.3f}" for v in path))


if __name__ == "__main__":
    main()

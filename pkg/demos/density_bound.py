"""Kernel density sup of affine models against the innovation-density bound.

Run with ``python3 demos/density_bound.py``.
"""

import numpy as np

from infchain import models, samplers, stats


def main():
    normal = samplers.Normal()
    arch = models.arch(0.1, [0.3], normal)
    ar1 = models.affine_model(lambda p: np.ones(p.shape[0]),
                              lambda p: 0.5 * models.lag(p, 1)[:, 0],
                              models.coef.finite([0.0]), models.coef.finite([0.5]), normal,
                              det_lower=1.0, name="AR(1) as affine model")
    for model in (arch, ar1):
        for n_joint in (1, 2):
            rep = stats.density_bound_check(model, n_joint, 100_000, seed=12345)
            sup, bound = rep.rows[0][2], rep.rows[1][2]
            print(f"{model.name:>26} n={n_joint}: KDE sup {sup:.4f}  bound {bound:.4f}  "
                  f"{'pass' if rep.verdict else 'fail'}")


if __name__ == "__main__":
    main()

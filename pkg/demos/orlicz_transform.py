"""The transform Phi~_q against its closed-form bound.

Run with ``python3 demos/orlicz_transform.py``.
"""

import numpy as np

from infchain import orlicz


def main():
    q = 2.0
    phis = [orlicz.power(3), orlicz.power(4), orlicz.power_log_for_decay(2, 1.0)]
    print(f"{'phi':>28} {'x':>8} {'numeric':>12} {'bound':>12}")
    for phi in phis:
        for x in np.logspace(-1, 1.5, 6):
            num = orlicz.phi_tilde_q(phi, q, x)
            bnd = orlicz.phi_tilde_q_bound(phi, q, x)
            print(f"{phi.label:>28} {x:8.3f} {num:12.5g} {bnd:12.5g}")

    # the Orlicz norm dominates the L1 norm
    x = np.random.default_rng(0).standard_normal(10_000)
    for phi in [orlicz.power(1), orlicz.power(2), orlicz.power_log(2, 1)]:
        print(f"||X||_{phi.label} = {orlicz.estimate_orlicz_norm(x, phi):.4f}")


if __name__ == "__main__":
    main()

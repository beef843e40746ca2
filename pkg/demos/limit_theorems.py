"""Finite-sample SLLN, CLT and LIL diagnostics for AR(1).

Run with ``python3 demos/limit_theorems.py``.
"""

from infchain import models, samplers, stats


def main():
    ar1 = models.ar1(0.5, samplers.Normal())
    for rep in (
        stats.slln_diagnostic(ar1, 1.5, [1000, 10_000, 100_000], 200, 12345),
        stats.clt_test(ar1, 2000, 1000, sigma2=4.0, seed=12345),
        stats.sip_lil_diagnostic(ar1, 4.0, 100_000, 200, 12345),
    ):
        print(f"{rep.theorem}: {'pass' if rep.verdict else 'fail'}")
        for _, param, stat, value, thr, _ in rep.table():
            print(f"  {param:>10} {stat:>24} {value:10.4f}  {thr}")
    for method in (stats.TAC, stats.BATCH):
        v = stats.estimate_long_run_variance(ar1, method, 100_000, 12345)
        print(f"long-run variance ({method}): {v:.4f}  (closed form 4)")


if __name__ == "__main__":
    main()

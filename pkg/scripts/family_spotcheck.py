"""Reduced-count spot checks on K-regular and Erdos-Renyi graphs against GW and local search.

    python3 scripts/family_spotcheck.py --sizes 100 200 --instances 10
"""
import argparse
import warnings

import numpy as np

from adapt_clifford.experiments import BatchConfig, run_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--K", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.5])
    ap.add_argument("--seed", type=int, default=9014)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    solvers = ["adapt-det", "adapt-rand", "gw:rounds=1", "local"]
    setups = [dict(family="regular", K=k, weights="unit") for k in args.K]
    setups += [dict(family="er", p=p) for p in args.p]
    for setup in setups:
        cfg = BatchConfig(sizes=args.sizes, instances=args.instances, solvers=solvers, master_seed=args.seed, **setup)
        results = run_batch(cfg)
        print(f"-- {cfg.family} {cfg.K_or_p}")
        for n in sorted(set(args.sizes)):
            line = " ".join(
                f"{s}={np.mean([r.cut_value for r in results if r.n == n and r.solver == s]):.2f}" for s in solvers)
            print(f"  N={n:<4} mean cut: {line}")


if __name__ == "__main__":
    main()

"""Exact-oracle benchmark on small complete graphs with U[0,1] weights.

Prints mean approximation ratio and success rate per size, then the
threshold-sweep estimates from the per-start ratios.

    python3 scripts/small_instances.py --sizes 10 12 14 16 18 20 --instances 100 --out runs/small
"""
import argparse
from pathlib import Path

import numpy as np

from adapt_clifford.experiments import BatchConfig, estimate_alpha_bar, per_start_ratios, run_batch, success_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 12, 14, 16, 18, 20])
    ap.add_argument("--instances", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1003)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="runs/small")
    args = ap.parse_args()

    cfg = BatchConfig(family="complete", sizes=args.sizes, instances=args.instances, solvers=["adapt-det"],
                      exact=True, exact_limit=max(args.sizes), master_seed=args.seed, threads=args.threads)
    out = Path(args.out)
    results = run_batch(cfg, out / "results.csv")
    print(f"{'N':>4} {'mean ratio':>11} {'min ratio':>10} {'success':>8}")
    for n in sorted(set(args.sizes)):
        rs = [r for r in results if r.n == n]
        ratios = np.array([r.ratio for r in rs])
        print(f"{n:>4} {ratios.mean():>11.5f} {ratios.min():>10.5f} {success_rate(rs):>8.2f}")
    if len(set(args.sizes)) >= 2:
        sweep = estimate_alpha_bar(per_start_ratios(results))
        print(f"alpha_bar={sweep.alpha_bar:.4f}  alpha_bar_r={sweep.alpha_bar_r:.4f}")


if __name__ == "__main__":
    main()

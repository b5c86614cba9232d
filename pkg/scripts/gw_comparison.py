"""Deterministic ADAPT against GW with 1 and I hyperplane roundings on complete U[0,1] graphs.

    python3 scripts/gw_comparison.py --sizes 50 100 200 --instances 60 --rounds 100
"""
import argparse
from pathlib import Path

import numpy as np

from adapt_clifford.experiments import BatchConfig, run_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    ap.add_argument("--instances", type=int, default=60)
    ap.add_argument("--rounds", type=int, default=100)
    ap.add_argument("--family", default="complete", choices=["complete", "regular", "er"])
    ap.add_argument("--seed", type=int, default=7011)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="runs/gw")
    args = ap.parse_args()

    solvers = ["adapt-det", "gw:rounds=1", f"gw:rounds={args.rounds}"]
    cfg = BatchConfig(family=args.family, sizes=args.sizes, instances=args.instances, solvers=solvers,
                      master_seed=args.seed, threads=args.threads)
    results = run_batch(cfg, Path(args.out) / f"{args.family}.csv")
    print(f"{'N':>5} " + " ".join(f"{s:>16}" for s in solvers) + "  adapt wins vs gw:1")
    for n in sorted(set(args.sizes)):
        energy = {s: np.array([r.ising_energy for r in results if r.n == n and r.solver == s]) for s in solvers}
        wins = np.mean(energy["adapt-det"] <= energy["gw:rounds=1"])
        print(f"{n:>5} " + " ".join(f"{energy[s].mean() / n:>16.4f}" for s in solvers) + f"  {wins:>6.2f}")


if __name__ == "__main__":
    main()

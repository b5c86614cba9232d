"""Wall-clock scaling of randomized ADAPT and GW on complete U[0,1] graphs.

    python3 scripts/tts_scaling.py --sizes 200 400 600 800 1000 --instances 5
"""
import argparse
import warnings

from adapt_clifford.experiments import BatchConfig, tts_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 600, 800, 1000])
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--solvers", nargs="+", default=["adapt-rand", "adapt-det", "gw:rounds=1", "gw:rounds=100"])
    ap.add_argument("--seed", type=int, default=8012)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    cfg = BatchConfig(family="complete", sizes=args.sizes, instances=args.instances, solvers=args.solvers,
                      master_seed=args.seed)
    res = tts_benchmark(cfg)
    for n, solver, mean, std in res.rows:
        print(f"{solver:>14} N={n:<5} {mean * 1e3:10.2f} ms  (sd {std * 1e3:.2f})")
    for solver, expo in res.exponents.items():
        print(f"{solver:>14} log-log exponent {expo:.2f}")


if __name__ == "__main__":
    main()

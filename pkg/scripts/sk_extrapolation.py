"""SK energy densities and q*N^(-2/3) + limit fits for both ADAPT variants.

    python3 scripts/sk_extrapolation.py --det-sizes 40 60 100 140 200 --rand-sizes 40 100 200 400 1000
"""
import argparse
from pathlib import Path

from adapt_clifford.experiments import PARISI_VALUE, SDP_SK_DENSITY, BatchConfig, density_by_size, fit_density, run_batch


def sweep(label, solver, sizes, instances, seed, threads, out):
    cfg = BatchConfig(family="sk", sizes=sizes, instances=instances, solvers=[solver],
                      master_seed=seed, threads=threads)
    results = run_batch(cfg, out / f"sk_{label}.csv")
    print(f"-- {label} ({solver}), {instances} instances per size")
    for n, (mean, std, count) in density_by_size(results).items():
        print(f"  N={n:<5} E/N={mean:.4f} +- {std:.4f}  (n={count})")
    fit = fit_density(results)
    print(f"  fit: limit={fit.limit_value:.4f} q={fit.q:.3f} residual={fit.residual:.2e} "
          f"({100 * fit.limit_value / PARISI_VALUE:.1f}% of {PARISI_VALUE}; SDP value {SDP_SK_DENSITY:.4f})")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--det-sizes", type=int, nargs="+", default=[40, 60, 100, 140, 200])
    ap.add_argument("--rand-sizes", type=int, nargs="+", default=[40, 100, 200, 400, 1000])
    ap.add_argument("--instances", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2004)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="runs/sk")
    args = ap.parse_args()
    out = Path(args.out)
    sweep("deterministic", "adapt-det", args.det_sizes, args.instances, args.seed, args.threads, out)
    sweep("randomized", "adapt-rand", args.rand_sizes, args.instances, args.seed + 1, args.threads, out)


if __name__ == "__main__":
    main()

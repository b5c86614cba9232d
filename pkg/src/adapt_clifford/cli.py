"""Command-line interface: ``adapt-clifford <command> ...``.

Exit codes: 0 success, 1 usage error, 2 runtime error. The default worker
count comes from ``ADAPT_CLIFFORD_THREADS`` (``--threads`` wins).
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from .adapt import Scripted, deterministic, randomized, run_from
from .baselines import DEFAULT_EXACT_LIMIT, GWParams, ProblemTooLargeError, exact_maxcut, gw_solve, local_search, sahni_gonzalez
from .experiments import (
    BatchConfig,
    FitError,
    cnot_count,
    default_threads,
    estimate_alpha_bar,
    fit_density,
    read_per_start,
    read_results,
    run_batch,
    tts_benchmark,
)
from .graph import (
    EdgeListParseError,
    InvalidInstanceError,
    WeightSpec,
    format_edge_list,
    gen_complete,
    gen_erdos_renyi,
    gen_regular,
    gen_sk,
    read_edge_list,
)
from .solution import Solution
from .stabilizer import verify_solution

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_config(path: str | None, **overrides) -> BatchConfig:
    data = {}
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise RuntimeError(f"cannot read config {path}: {exc}") from exc
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return BatchConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


# commands -------------------------------------------------------------------


def cmd_gen(args):
    try:
        spec = WeightSpec.parse(args.dist or ("unit" if args.family == "regular" else "u01"))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.family == "regular" and args.k is None:
        raise UsageError("regular graphs need --k")
    if args.family == "er" and args.p is None:
        raise UsageError("er graphs need --p")
    seed = _seed(args)
    try:
        if args.family == "complete":
            g = gen_complete(args.n, spec, seed)
        elif args.family == "sk":
            g = gen_sk(args.n, seed)
        elif args.family == "regular":
            g = gen_regular(args.n, args.k, spec, seed)
        else:
            g = gen_erdos_renyi(args.n, args.p, seed)
    except (InvalidInstanceError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _solve(args, g):
    if args.solver == "adapt-det":
        return deterministic(g, workers=args.threads or default_threads())
    if args.solver == "adapt-rand":
        return randomized(g, _seed(args))
    if args.solver == "adapt-from":
        if args.start is None:
            raise UsageError("adapt-from needs --start")
        policy = Scripted(json.loads(args.script)) if args.script else None
        return run_from(g, args.start, policy) if policy else run_from(g, args.start)
    if args.solver == "gw":
        return gw_solve(g, GWParams(rank=args.rank, max_iters=args.max_iters, grad_tol=args.grad_tol,
                                    rounds=args.rounds, seed=_seed(args)))
    if args.solver == "local":
        return local_search(g, None, _seed(args))
    return sahni_gonzalez(g, _seed(args))


def cmd_solve(args):
    g = read_edge_list(args.graph)
    sol = _solve(args, g)
    if args.pretty:
        a, b = sol.assignment.sets()
        text = (f"solver      {sol.solver}\nstart node  {sol.start_node}\ncut value   {sol.cut_value:.12g}\n"
                f"energy      {sol.ising_energy:.12g}\nside A      {a}\nside B      {b}\n"
                f"time        {sol.wall_time_s:.4g} s")
    else:
        text = sol.to_json(per_start=args.per_start)
    _emit(text, args.json)
    return EXIT_OK


def cmd_exact(args):
    g = read_edge_list(args.graph)
    if args.limit > DEFAULT_EXACT_LIMIT:
        print(f"warning: exact enumeration of 2^{g.n - 1} cuts may take a long time", file=sys.stderr)
    res = exact_maxcut(g, args.limit)
    _emit(json.dumps({"optimum_cut": res.optimum_cut, "optimum_energy": res.optimum_energy,
                      "witness": res.witness.to_string(), "evaluated": res.evaluated}), args.out)
    return EXIT_OK


def cmd_verify(args):
    g = read_edge_list(args.graph)
    if g.n > args.max_n:
        raise UsageError(f"graph has {g.n} nodes, above the oracle cap {args.max_n} (see --max-n)")
    try:
        sol = Solution.from_json(Path(args.solution).read_text(encoding="utf-8"))
    except (KeyError, ValueError) as exc:
        raise RuntimeError(f"cannot parse solution: {exc}") from exc
    ok, msg = verify_solution(g, sol, return_reason=True)
    a, b = sol.assignment.sets()
    print(json.dumps({"verified": ok, "message": msg, "cut": [a, b], "cut_value": sol.cut_value}))
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_batch(args):
    cfg = _load_config(args.config, threads=args.threads)
    results = run_batch(cfg, args.out)
    failed = sum(1 for r in results if r.error)
    print(json.dumps({"rows": len(results), "failed": failed, "out": args.out}))
    return EXIT_OK


def cmd_fit(args):
    if args.model != "parisi":
        raise UsageError(f"unknown model {args.model!r}")
    results = read_results(args.input)
    n_range = None
    if args.n_min is not None or args.n_max is not None:
        n_range = (args.n_min or 0, args.n_max or 10**9)
    fit = fit_density(results, n_range, args.solver)
    _emit(json.dumps(asdict(fit)), args.out)
    return EXIT_OK


def cmd_alpha_bar(args):
    data = read_per_start(args.input)
    res = estimate_alpha_bar(data, mode=args.mode)
    _emit(json.dumps({"alpha_bar": res.alpha_bar, "alpha_bar_r": res.alpha_bar_r,
                      "crossing_found": res.crossing_found, "crossing_r_found": res.crossing_r_found,
                      "grid": res.grid}), args.out)
    return EXIT_OK


def cmd_tts(args):
    cfg = _load_config(args.config)
    res = tts_benchmark(cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("n,solver,mean_s,std_s\n")
            for n, s, m, sd in res.rows:
                fh.write(f"{n},{s},{m!r},{sd!r}\n")
    print(json.dumps({"exponents": res.exponents, "rows": res.rows}))
    return EXIT_OK


def cmd_cnot(args):
    print(cnot_count(args.n, args.topology))
    return EXIT_OK


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adapt-clifford", description="ADAPT-Clifford MaxCut toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", help="generate a random graph as an edge list")
    s.add_argument("family", choices=["complete", "sk", "regular", "er"])
    s.add_argument("--n", type=int, required=True, help="number of nodes")
    s.add_argument("--dist", help="weights: unit, u01, u11, uniform:a:b, exp[:mean], normal[:mean:var] "
                                  "(default u01 for complete, unit for regular)")
    s.add_argument("--k", type=int, help="degree for regular graphs")
    s.add_argument("--p", type=float, help="edge probability for er graphs")
    s.add_argument("--seed", type=int, help="64-bit seed (random and printed if omitted)")
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve MaxCut on an edge-list graph")
    s.add_argument("graph", help="edge-list file")
    s.add_argument("--solver", default="adapt-det",
                   choices=["adapt-det", "adapt-rand", "adapt-from", "gw", "local", "sg"])
    s.add_argument("--seed", type=int, help="seed for randomized solvers (random and printed if omitted)")
    s.add_argument("--start", type=int, help="adapt-from: start node")
    s.add_argument("--script", help="adapt-from: JSON list of [node, side] tie-break choices")
    s.add_argument("--per-start", action="store_true", help="adapt-det: include every start's result")
    s.add_argument("--rounds", type=int, default=1, help="gw: hyperplane roundings (default 1)")
    s.add_argument("--rank", type=int, help="gw: relaxation rank (default ceil(sqrt(2n))+1)")
    s.add_argument("--max-iters", type=int, default=2000, help="gw: ascent iterations (default 2000)")
    s.add_argument("--grad-tol", type=float, default=1e-6, help="gw: gradient tolerance (default 1e-6)")
    s.add_argument("--threads", type=int, help="adapt-det worker threads")
    s.add_argument("--json", help="write the solution JSON here instead of stdout")
    s.add_argument("--pretty", action="store_true", help="human-readable summary")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("exact", help="exact MaxCut by enumeration")
    s.add_argument("graph")
    s.add_argument("--limit", type=int, default=DEFAULT_EXACT_LIMIT,
                   help=f"largest n accepted (default {DEFAULT_EXACT_LIMIT})")
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("verify", help="check a solution by stabilizer-tableau replay")
    s.add_argument("graph")
    s.add_argument("solution", help="solution JSON written by 'solve'")
    s.add_argument("--max-n", type=int, default=256, help="oracle size cap (default 256)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("batch", help="run a batch experiment from a JSON config")
    s.add_argument("--config", required=True, help="batch config JSON")
    s.add_argument("--out", required=True, help="results CSV")
    s.add_argument("--threads", type=int, help="worker processes")
    s.set_defaults(func=cmd_batch)

    s = sub.add_parser("fit", help="fit mean energy density to q N^(-2/3) + limit")
    s.add_argument("--model", default="parisi", help="fit model (only 'parisi')")
    s.add_argument("--in", dest="input", required=True, help="results CSV")
    s.add_argument("--solver", help="only rows of this solver tag")
    s.add_argument("--n-min", type=int)
    s.add_argument("--n-max", type=int)
    s.add_argument("--config", help="unused; accepted for symmetry with batch")
    s.add_argument("--out", help="write the fit JSON here")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("alpha-bar", help="mean approximation ratio estimate from per-start data")
    s.add_argument("--in", dest="input", required=True, help="per-start CSV with exact optima")
    s.add_argument("--mode", choices=["deterministic", "randomized"], default="deterministic")
    s.add_argument("--config", help="unused; accepted for symmetry with batch")
    s.add_argument("--out", help="write the sweep JSON here")
    s.set_defaults(func=cmd_alpha_bar)

    s = sub.add_parser("tts", help="time-to-solution scaling from a batch config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="timing table CSV")
    s.set_defaults(func=cmd_tts)

    s = sub.add_parser("cnot", help="CNOT count of one ADAPT-Clifford circuit")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--topology", choices=["all-to-all", "linear"], default="all-to-all")
    s.set_defaults(func=cmd_cnot)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        print(f"adapt-clifford {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListParseError, InvalidInstanceError, ProblemTooLargeError, FitError,
            RuntimeError, ValueError) as exc:
        print(f"adapt-clifford {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

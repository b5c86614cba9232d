"""Batch runs, persistence, energy-density fits, the mean-ratio threshold
sweep, time-to-solution measurement and CNOT resource counts."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .adapt import deterministic, randomized
from .baselines import DEFAULT_EXACT_LIMIT, GWParams, exact_maxcut, gw_solve, local_search, sahni_gonzalez
from .cut_energy import approx_ratio
from .graph import Graph, WeightSpec, derive_seed, gen_complete, gen_erdos_renyi, gen_regular, gen_sk, total_weight
from .solution import Solution

log = logging.getLogger(__name__)

__all__ = [
    "BatchConfig",
    "InstanceResult",
    "FitResult",
    "ThresholdSweepResult",
    "TTSResult",
    "FitError",
    "make_instance",
    "make_solver",
    "run_batch",
    "write_results",
    "read_results",
    "write_per_start",
    "read_per_start",
    "energy_density",
    "density_by_size",
    "success_rate",
    "fit_density",
    "fit_power_law",
    "estimate_alpha_bar",
    "per_start_ratios",
    "tts_benchmark",
    "fit_exponent",
    "cnot_count",
    "PARISI_VALUE",
    "SDP_SK_DENSITY",
]

PARISI_VALUE = -0.763166
SDP_SK_DENSITY = -2.0 / math.pi
FAMILIES = ("complete", "sk", "regular", "er")
THRESHOLD_GRID = np.round(np.arange(0.88, 1.0 + 1e-12, 0.0005), 4)

CSV_COLUMNS = [
    "family", "n", "K_or_p", "instance_seed", "solver", "params", "cut_value", "ising_energy",
    "exact_optimum", "ratio", "wall_time_s", "exact_energy", "total_weight", "error",
]
PER_START_COLUMNS = ["family", "n", "instance_seed", "k", "cut_value", "ising_energy", "exact_optimum"]


class FitError(ValueError):
    pass


# configuration -------------------------------------------------------------


@dataclass
class BatchConfig:
    family: str = "complete"
    sizes: list[int] = field(default_factory=lambda: [10])
    instances: int = 10
    solvers: list[str] = field(default_factory=lambda: ["adapt-det"])
    master_seed: int = 0
    exact: bool = False
    exact_limit: int = DEFAULT_EXACT_LIMIT
    weights: str = "u01"  # complete/regular families, see WeightSpec.parse
    K: int = 3  # regular family
    p: float = 0.5  # er family
    threads: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.instances < 1 or not self.sizes:
            raise ValueError("need at least one size and one instance")
        for s in self.solvers:
            make_solver(s)
        WeightSpec.parse(self.weights)

    @property
    def K_or_p(self) -> str:
        if self.family == "regular":
            return str(self.K)
        if self.family == "er":
            return repr(self.p)
        return ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "BatchConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "BatchConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class InstanceResult:
    family: str
    n: int
    K_or_p: str
    instance_seed: int
    solver: str
    params: str
    cut_value: float
    ising_energy: float
    wall_time_s: float
    exact_optimum: float | None = None
    exact_energy: float | None = None
    ratio: float | None = None
    total_weight: float | None = None
    error: str = ""
    per_start: list[tuple[int, float, float]] | None = None

    def row(self) -> dict:
        def num(x):
            return "" if x is None else repr(float(x))

        return {
            "family": self.family, "n": self.n, "K_or_p": self.K_or_p,
            "instance_seed": self.instance_seed, "solver": self.solver, "params": self.params,
            "cut_value": num(self.cut_value), "ising_energy": num(self.ising_energy),
            "exact_optimum": num(self.exact_optimum), "ratio": num(self.ratio),
            "wall_time_s": num(self.wall_time_s), "exact_energy": num(self.exact_energy),
            "total_weight": num(self.total_weight), "error": self.error,
        }

    @classmethod
    def from_row(cls, row: dict) -> "InstanceResult":
        def num(key):
            v = row.get(key, "")
            return None if v in ("", None) else float(v)

        return cls(
            family=row["family"], n=int(row["n"]), K_or_p=row["K_or_p"],
            instance_seed=int(row["instance_seed"]), solver=row["solver"], params=row["params"],
            cut_value=num("cut_value") if row["cut_value"] else math.nan,
            ising_energy=num("ising_energy") if row["ising_energy"] else math.nan,
            wall_time_s=num("wall_time_s") or 0.0,
            exact_optimum=num("exact_optimum"), exact_energy=num("exact_energy"),
            ratio=num("ratio"), total_weight=num("total_weight"), error=row.get("error", ""),
        )


# instances and solvers ------------------------------------------------------


def make_instance(cfg: BatchConfig, n: int, seed: int) -> Graph:
    if cfg.family == "complete":
        return gen_complete(n, WeightSpec.parse(cfg.weights), seed)
    if cfg.family == "sk":
        return gen_sk(n, seed)
    if cfg.family == "regular":
        return gen_regular(n, cfg.K, WeightSpec.parse(cfg.weights), seed)
    return gen_erdos_renyi(n, cfg.p, seed)


def _parse_solver(spec: str) -> tuple[str, dict]:
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        params[key] = json.loads(val)
    return name, params


def make_solver(spec: str) -> Callable[[Graph, int], Solution]:
    """Solver from a tag such as ``adapt-det``, ``adapt-rand``, ``gw:rounds=100``,
    ``local`` or ``sg``. The callable takes ``(graph, seed)``."""
    name, params = _parse_solver(spec)
    if name == "adapt-det":
        return lambda g, seed: deterministic(g)
    if name == "adapt-rand":
        return lambda g, seed: randomized(g, seed)
    if name == "gw":
        allowed = {"rounds", "rank", "max_iters", "grad_tol"}
        if set(params) - allowed:
            raise ValueError(f"unknown gw parameters {sorted(set(params) - allowed)}")
        return lambda g, seed: gw_solve(g, GWParams(seed=seed, **params))
    if name == "local":
        return lambda g, seed: local_search(g, None, seed)
    if name == "sg":
        return lambda g, seed: sahni_gonzalez(g, seed)
    raise ValueError(f"unknown solver {spec!r}")


def _signed(g: Graph) -> bool:
    return bool(np.any(g.edge_arrays[2] < 0))


def _run_instance(args) -> list[InstanceResult]:
    cfg, n, index = args
    seed = derive_seed(cfg.master_seed, cfg.family, n, index)
    g = make_instance(cfg, n, seed)
    w_tot = total_weight(g)
    opt_cut = opt_energy = None
    if cfg.exact and n <= cfg.exact_limit:
        ex = exact_maxcut(g, cfg.exact_limit)
        opt_cut, opt_energy = ex.optimum_cut, ex.optimum_energy
    out = []
    for spec in cfg.solvers:
        solver = make_solver(spec)
        params = json.dumps(_parse_solver(spec)[1], sort_keys=True)
        res = InstanceResult(cfg.family, n, cfg.K_or_p, seed, spec, params,
                             math.nan, math.nan, 0.0, opt_cut, opt_energy, None, w_tot)
        try:
            t0 = time.perf_counter()
            sol = solver(g, derive_seed(seed, spec))
            res.wall_time_s = time.perf_counter() - t0
            res.cut_value, res.ising_energy = sol.cut_value, sol.ising_energy
            res.per_start = sol.per_start
            if opt_cut is not None:
                if _signed(g):
                    res.ratio = approx_ratio(sol.ising_energy, opt_energy) if opt_energy else None
                else:
                    res.ratio = approx_ratio(sol.cut_value, opt_cut) if opt_cut else None
        except Exception as exc:  # recorded per instance, batch continues
            log.warning("solver %s failed on %s n=%d seed=%d: %s", spec, cfg.family, n, seed, exc)
            res.error = f"{type(exc).__name__}: {exc}"
        out.append(res)
    return out


def run_batch(cfg: BatchConfig, out: str | Path | None = None,
              progress: Callable[[InstanceResult], None] | None = None) -> list[InstanceResult]:
    """Run every solver on every generated instance.

    Instance seeds are ``derive_seed(master_seed, family, n, index)``. Rows are
    written to ``out`` (CSV) as they complete, in canonical order (size,
    instance, solver as configured); a JSON sidecar stores the config. Deterministic
    solvers also write per-start rows to ``<out stem>.perstart.csv``.
    """
    tasks = [(cfg, n, i) for n in sorted(cfg.sizes) for i in range(cfg.instances)]
    writer = _ResultWriter(out, cfg) if out is not None else None
    results: list[InstanceResult] = []
    try:
        if cfg.threads > 1:
            with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
                chunks = pool.map(_run_instance, tasks)
                for chunk in chunks:
                    _collect(chunk, results, writer, progress)
        else:
            for task in tasks:
                _collect(_run_instance(task), results, writer, progress)
    finally:
        if writer is not None:
            writer.close()
    return results


def _collect(chunk, results, writer, progress):
    for res in chunk:
        results.append(res)
        if writer is not None:
            writer.write(res)
        if progress is not None:
            progress(res)


class _ResultWriter:
    def __init__(self, path: str | Path, cfg: BatchConfig):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.fh = open(path, "w", newline="", encoding="utf-8")
            self.ps_fh = open(path.with_suffix(".perstart.csv"), "w", newline="", encoding="utf-8")
            sidecar = {"config": asdict(cfg), "version": __version__}
            path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot open results file {path}: {exc}") from exc
        self.csv = csv.DictWriter(self.fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        self.csv.writeheader()
        self.ps = csv.writer(self.ps_fh, lineterminator="\n")
        self.ps.writerow(PER_START_COLUMNS)

    def write(self, res: InstanceResult):
        self.csv.writerow(res.row())
        self.fh.flush()
        if res.per_start:
            for k, c, e in res.per_start:
                self.ps.writerow([res.family, res.n, res.instance_seed, k, repr(c), repr(e),
                                  "" if res.exact_optimum is None else repr(res.exact_optimum)])
            self.ps_fh.flush()

    def close(self):
        self.fh.close()
        self.ps_fh.close()


def write_results(results: Iterable[InstanceResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in results:
            w.writerow(r.row())


def read_results(path: str | Path) -> list[InstanceResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [InstanceResult.from_row(row) for row in csv.DictReader(fh)]


def write_per_start(results: Iterable[InstanceResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PER_START_COLUMNS)
        for r in results:
            for k, c, e in r.per_start or []:
                w.writerow([r.family, r.n, r.instance_seed, k, repr(c), repr(e),
                            "" if r.exact_optimum is None else repr(r.exact_optimum)])


def read_per_start(path: str | Path) -> list[tuple[int, np.ndarray]]:
    """Per-instance ``(n, ratios)`` with ratios = start cut / exact optimum cut."""
    groups: dict[tuple, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if not row["exact_optimum"]:
                raise ValueError("per-start rows need exact_optimum")
            key = (row["family"], int(row["n"]), int(row["instance_seed"]))
            groups.setdefault(key, []).append(float(row["cut_value"]) / float(row["exact_optimum"]))
    return [(key[1], np.array(v)) for key, v in groups.items()]


def per_start_ratios(results: Iterable[InstanceResult]) -> list[tuple[int, np.ndarray]]:
    out = []
    for r in results:
        if r.per_start is None:
            continue
        if r.exact_optimum is None:
            raise ValueError("per-start ratios need exact optima")
        out.append((r.n, np.array([c for _, c, _ in r.per_start]) / r.exact_optimum))
    return out


# metrics -------------------------------------------------------------------


def energy_density(r: InstanceResult) -> float:
    """Energy per node. SK instances report ``sum_{i<j} w s s / n`` (twice the
    package's Ising energy), every other family ``ising_energy / n``."""
    scale = 2.0 if r.family == "sk" else 1.0
    return scale * r.ising_energy / r.n


def density_by_size(results: Iterable[InstanceResult], solver: str | None = None):
    """``{n: (mean, sample std, count)}`` of per-instance energy densities."""
    groups: dict[int, list[float]] = {}
    for r in results:
        if r.error or (solver is not None and r.solver != solver):
            continue
        groups.setdefault(r.n, []).append(energy_density(r))
    return {n: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0, len(v))
            for n, v in sorted(groups.items())}


def success_rate(results: Sequence[InstanceResult], tol: float = 1e-10) -> float:
    """Fraction of results whose energy is within ``tol`` of the exact optimum energy."""
    if not results:
        raise ValueError("no results")
    hits = 0
    for r in results:
        if r.exact_energy is None:
            if r.exact_optimum is None or r.total_weight is None:
                raise ValueError("success rate needs exact optima on every result")
            exact_e = r.total_weight / 2 - r.exact_optimum
        else:
            exact_e = r.exact_energy
        hits += abs(r.ising_energy - exact_e) < tol
    return hits / len(results)


@dataclass
class FitResult:
    q: float
    limit_value: float
    residual: float
    n_range: tuple[int, int]


def fit_power_law(sizes: Sequence[float], values: Sequence[float], exponent: float = -2.0 / 3.0,
                  n_range: tuple[int, int] | None = None) -> FitResult:
    """Least squares for ``value = q * N**exponent + limit``."""
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if n_range is not None:
        keep = (sizes >= n_range[0]) & (sizes <= n_range[1])
        sizes, values = sizes[keep], values[keep]
    if np.unique(sizes).size < 2:
        raise FitError("need at least two distinct sizes to fit")
    design = np.column_stack([sizes ** exponent, np.ones_like(sizes)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - values) ** 2)))
    return FitResult(float(coef[0]), float(coef[1]), resid, (int(sizes.min()), int(sizes.max())))


def fit_density(results: Iterable[InstanceResult], n_range: tuple[int, int] | None = None,
                solver: str | None = None, exponent: float = -2.0 / 3.0,
                min_sizes: int = 3) -> FitResult:
    """Fit mean energy density against ``N**(-2/3)``; the intercept is the large-N limit."""
    by_n = density_by_size(results, solver)
    sizes = [n for n in by_n if n_range is None or n_range[0] <= n <= n_range[1]]
    if len(sizes) < min_sizes:
        raise FitError(f"need at least {min_sizes} distinct sizes, got {len(sizes)}")
    return fit_power_law(sizes, [by_n[n][0] for n in sizes], exponent)


@dataclass
class ThresholdSweepResult:
    thresholds: np.ndarray
    slopes: np.ndarray
    alpha_bar: float
    alpha_bar_r: float
    crossing_found: bool
    crossing_r_found: bool

    @property
    def grid(self) -> list[tuple[float, float]]:
        return list(zip(self.thresholds.tolist(), self.slopes.tolist()))


def estimate_alpha_bar(data: Sequence[tuple[int, np.ndarray]], thresholds: Sequence[float] | None = None,
                       mode: str = "deterministic", slope_eps: float = 1e-12) -> ThresholdSweepResult:
    """Threshold sweep over per-start approximation ratios.

    ``data`` holds ``(N, ratios)`` per instance. For each threshold, Num is the
    number of starts with ratio above it; the slope of ``mean(Num) - std(Num)``
    against N is fitted by least squares. ``alpha_bar`` is the last threshold
    before the slope turns negative, ``alpha_bar_r`` the last one before it
    drops below 0.5. ``mode`` only selects which of the two is logged.
    """
    if mode not in ("deterministic", "randomized"):
        raise ValueError("mode must be 'deterministic' or 'randomized'")
    thr = np.asarray(THRESHOLD_GRID if thresholds is None else thresholds, dtype=float)
    if np.any(np.diff(thr) <= 0):
        raise ValueError("thresholds must increase")
    sizes = sorted({n for n, _ in data})
    if len(sizes) < 2:
        raise FitError("need at least two sizes")
    # counts[i, t]: starts of instance i above threshold t
    counts = np.array([[np.count_nonzero(r > a) for a in thr] for _, r in data])
    if np.any(np.diff(counts, axis=1) > 0):
        raise AssertionError("Num(N; alpha) increased with the threshold")
    ns = np.array([n for n, _ in data])
    slopes = np.empty(thr.size)
    for t in range(thr.size):
        ys = []
        for n in sizes:
            c = counts[ns == n, t]
            ys.append(c.mean() - (c.std(ddof=1) if c.size > 1 else 0.0))
        slopes[t] = np.polyfit(np.array(sizes, dtype=float), np.array(ys), 1)[0]

    def last_before(level):
        below = np.flatnonzero(slopes < level - slope_eps)
        if below.size == 0:
            return float(thr[-1]), False
        first = below[0]
        return float(thr[max(first - 1, 0)]), bool(first > 0)

    alpha_bar, found = last_before(0.0)
    alpha_bar_r, found_r = last_before(0.5)
    log.info("threshold sweep (%s): alpha_bar=%.4f alpha_bar_r=%.4f", mode, alpha_bar, alpha_bar_r)
    return ThresholdSweepResult(thr, slopes, alpha_bar, alpha_bar_r, found, found_r)


# timing --------------------------------------------------------------------


@dataclass
class TTSResult:
    rows: list[tuple[int, str, float, float]]  # (n, solver, mean seconds, std)
    exponents: dict[str, float]


def fit_exponent(sizes: Sequence[float], times: Sequence[float]) -> float:
    """Slope of log(time) against log(n)."""
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def _time_once(fn: Callable[[], object], min_time: float = 1e-3) -> float:
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / reps
        if reps == 1:
            warnings.warn("timer resolution: batching repetitions per measurement", RuntimeWarning,
                          stacklevel=3)
        reps *= 10


def tts_benchmark(cfg: BatchConfig, instance_fn: Callable[[int, int], Graph] | None = None,
                  solvers: dict[str, Callable[[Graph, int], object]] | None = None) -> TTSResult:
    """Wall time per instance for every solver and size, plus log-log exponents.

    Instance generation is excluded; one warm-up run per (solver, size) is
    discarded. Needs at least three sizes spanning a factor of four.
    """
    sizes = sorted(cfg.sizes)
    if len(sizes) < 3 or sizes[-1] < 4 * sizes[0]:
        raise ValueError("TTS needs at least three sizes spanning a 4x range")
    if instance_fn is None:
        instance_fn = lambda n, i: make_instance(cfg, n, derive_seed(cfg.master_seed, cfg.family, n, i))
    if solvers is None:
        solvers = {s: make_solver(s) for s in cfg.solvers}
    rows = []
    exponents = {}
    for name, solve in solvers.items():
        means = []
        for n in sizes:
            graphs = [instance_fn(n, i) for i in range(cfg.instances)]
            solve(graphs[0], 0)  # warm-up
            times = [_time_once(lambda g=g, i=i: solve(g, derive_seed(cfg.master_seed, name, n, i)))
                     for i, g in enumerate(graphs)]
            rows.append((n, name, float(np.mean(times)), float(np.std(times))))
            means.append(float(np.mean(times)))
        exponents[name] = fit_exponent(sizes, means)
    return TTSResult(rows, exponents)


# resources -----------------------------------------------------------------


def cnot_count(n: int, topology: str = "all-to-all") -> int:
    """CNOTs for one ADAPT-Clifford circuit: ``2n`` all-to-all, and
    ``2 + (n-2)(3(n-3) + 8)`` on a line with worst-case swap distances."""
    if n < 2:
        raise ValueError("need n >= 2")
    if topology == "all-to-all":
        return 2 * n
    if topology == "linear":
        return 2 + (n - 2) * (3 * (n - 3) + 8)
    raise ValueError(f"unknown topology {topology!r}")


def default_threads() -> int:
    env = os.environ.get("ADAPT_CLIFFORD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1

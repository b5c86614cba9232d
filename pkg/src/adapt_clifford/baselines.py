"""Reference MaxCut solvers: exact Gray-code enumeration, Goemans-Williamson
with repeated hyperplane rounding, best-improvement local search and the
Sahni-Gonzalez greedy."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .adapt import _csr
from .cut_energy import CutAssignment, cut_value, ising_energy
from .graph import Graph, InvalidInstanceError, make_rng, total_weight
from .solution import Solution

__all__ = [
    "ExactResult",
    "ProblemTooLargeError",
    "exact_maxcut",
    "exact_maxcut_naive",
    "GWParams",
    "GWRelaxation",
    "gw_relax",
    "gw_solve",
    "local_search",
    "sahni_gonzalez",
]

DEFAULT_EXACT_LIMIT = 26


class ProblemTooLargeError(ValueError):
    pass


@dataclass
class ExactResult:
    optimum_cut: float
    optimum_energy: float
    witness: CutAssignment
    evaluated: int


@numba.njit(cache=True)
def _gray_walk(n, indptr, indices, weights):
    # node 0 stays on side 0; walk the other n-1 bits in Gray order
    side = np.zeros(n, dtype=np.int8)
    cut = 0.0
    best = 0.0
    best_code = 0
    total = 1 << (n - 1)
    for t in range(1, total):
        v = 1
        tt = t
        while (tt & 1) == 0:
            tt >>= 1
            v += 1
        delta = 0.0
        sv = side[v]
        for p in range(indptr[v], indptr[v + 1]):
            if side[indices[p]] == sv:
                delta += weights[p]
            else:
                delta -= weights[p]
        side[v] = 1 - sv
        cut += delta
        if cut > best:
            best = cut
            best_code = t ^ (t >> 1)
    return best, best_code, total


def exact_maxcut(g: Graph, limit: int = DEFAULT_EXACT_LIMIT) -> ExactResult:
    """Exact MaxCut by Gray-code enumeration of the 2**(n-1) cuts with node 0 fixed.

    Each step flips one node and updates the cut in O(degree).
    """
    if g.n > limit:
        raise ProblemTooLargeError(f"exact enumeration refused for n={g.n} > limit={limit}")
    if g.n == 1:
        z = CutAssignment([0])
        return ExactResult(0.0, ising_energy(g, z), z, 1)
    csr = _csr(g)
    _, code, evaluated = _gray_walk(g.n, csr.indptr, csr.indices, csr.weights)
    bits = np.zeros(g.n, dtype=np.int8)
    for v in range(1, g.n):
        bits[v] = (code >> (v - 1)) & 1
    z = CutAssignment(bits)
    # re-evaluate the witness so the optimum carries no accumulated rounding
    return ExactResult(cut_value(g, z), ising_energy(g, z), z, int(evaluated))


def exact_maxcut_naive(g: Graph) -> ExactResult:
    """Vectorised brute force over all assignments with node 0 fixed (small n only)."""
    n = g.n
    codes = np.arange(1 << max(n - 1, 0), dtype=np.int64)
    bits = np.zeros((codes.size, n), dtype=np.int8)
    for v in range(1, n):
        bits[:, v] = (codes >> (v - 1)) & 1
    i, j, w = g.edge_arrays
    values = ((bits[:, i] != bits[:, j]) * w).sum(axis=1)
    best = int(np.argmax(values))
    z = CutAssignment(bits[best])
    return ExactResult(cut_value(g, z), ising_energy(g, z), z, int(codes.size))


# Goemans-Williamson --------------------------------------------------------


@dataclass
class GWParams:
    rank: int | None = None  # default ceil(sqrt(2n)) + 1
    max_iters: int = 2000
    grad_tol: float = 1e-6
    rounds: int = 1
    seed: int | None = None

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("relaxation rank must be at least 2")
        if self.rounds < 1:
            raise ValueError("need at least one rounding")

    def rank_for(self, n: int) -> int:
        return self.rank if self.rank is not None else math.ceil(math.sqrt(2 * n)) + 1


@dataclass
class GWRelaxation:
    vectors: np.ndarray  # (n, rank), unit rows
    objective: float  # sum_{i<j} w_ij (1 - y_i . y_j)
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)

    @property
    def upper_bound(self) -> float:
        """Relaxed cut value, an upper bound on the MaxCut optimum at convergence."""
        return 0.5 * self.objective


def _normalize_rows(y: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(y, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return y / norms


def gw_relax(g: Graph, params: GWParams, rng: np.random.Generator | None = None) -> GWRelaxation:
    """Low-rank vector relaxation by projected gradient ascent on the sphere product.

    Maximises ``F(Y) = sum_{i<j} w_ij (1 - y_i.y_j) = W - tr(Y^T A Y)/2``.
    Steps are chosen by Armijo backtracking, so accepted iterates never
    decrease F.
    """
    rng = rng if rng is not None else make_rng(params.seed)
    a = g.dense
    n = g.n
    r = min(params.rank_for(n), n) if n > 1 else 1
    r = max(r, 1)
    w_tot = total_weight(g)
    y = _normalize_rows(rng.standard_normal((n, r)))

    def objective(yy, ay):
        return w_tot - 0.5 * float(np.sum(yy * ay))

    ay = a @ y
    f = objective(y, ay)
    history = [f]
    scale = max(1.0, float(np.abs(a).sum(axis=1).max()))
    trial = 1.0 / scale
    prev_y = prev_grad = None
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        # Riemannian ascent direction: -A Y projected onto the row tangent spaces
        grad = -ay + np.sum(ay * y, axis=1, keepdims=True) * y
        gnorm2 = float(np.sum(grad * grad))
        if math.sqrt(gnorm2) < params.grad_tol:
            converged = True
            it -= 1
            break
        if prev_y is not None:
            # Barzilai-Borwein trial step, then monotone Armijo backtracking
            dy = y - prev_y
            dg = grad - prev_grad
            denom = abs(float(np.sum(dy * dg)))
            if denom > 0:
                trial = min(float(np.sum(dy * dy)) / denom, 1e3 / scale)
        t = trial
        while True:
            y_new = _normalize_rows(y + t * grad)
            ay_new = a @ y_new
            f_new = objective(y_new, ay_new)
            if f_new >= f + 1e-4 * t * gnorm2 or t < 1e-14:
                break
            t *= 0.5
        if f_new < f:
            # no ascent left at machine precision
            converged = True
            break
        prev_y, prev_grad = y, grad
        y, ay, f, trial = y_new, ay_new, f_new, t
        history.append(f)
    return GWRelaxation(y, f, it, converged, history)


def _round(g: Graph, y: np.ndarray, rounds: int, rng: np.random.Generator, block: int = 1024):
    a = g.dense
    best_e, best_h = math.inf, None
    done = 0
    while done < rounds:
        m = min(block, rounds - done)
        r = rng.standard_normal((y.shape[1], m))
        h = np.where(y @ r >= 0, 1.0, -1.0)
        energies = 0.25 * np.sum(h * (a @ h), axis=0)
        idx = int(np.argmin(energies))
        if energies[idx] < best_e:
            best_e, best_h = float(energies[idx]), h[:, idx].copy()
        done += m
    return best_h


def gw_solve(g: Graph, params: GWParams = GWParams()) -> Solution:
    """Goemans-Williamson: vector relaxation, then ``params.rounds`` Gaussian hyperplane
    roundings, keeping the best cut. Non-convergence adds a warning but still returns."""
    if g.n < 2:
        raise InvalidInstanceError("GW needs at least two nodes")
    t0 = time.perf_counter()
    rng = make_rng(params.seed)
    relax = gw_relax(g, params, rng)
    h = _round(g, relax.vectors, params.rounds, rng)
    z = CutAssignment.from_spins(h.astype(np.int64))
    sol = Solution(
        assignment=z,
        cut_value=cut_value(g, z),
        ising_energy=ising_energy(g, z),
        solver="gw",
        seed=params.seed,
        wall_time_s=time.perf_counter() - t0,
        params={"rounds": params.rounds, "rank": relax.vectors.shape[1],
                "iterations": relax.iterations, "relaxed_value": relax.upper_bound},
    )
    if not relax.converged:
        msg = f"GW relaxation stopped after {relax.iterations} iterations without reaching grad_tol"
        sol.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return sol


# local search and greedy ---------------------------------------------------


def local_search(g: Graph, start: CutAssignment | None = None, seed: int | None = None,
                 tol: float = 1e-12) -> Solution:
    """Best-improvement single-flip descent to a local optimum.

    Without ``start`` a uniformly random assignment is drawn from ``seed``.
    Ties between equally good flips go to the lowest node index.
    """
    t0 = time.perf_counter()
    if start is None:
        start = CutAssignment(make_rng(seed).integers(0, 2, g.n))
    if start.n != g.n:
        raise ValueError("start assignment length does not match graph")
    a = g.dense
    s = start.spins.astype(float)
    field_ = a @ s
    flips = 0
    while True:
        gain = s * field_  # cut increase from flipping each node
        i = int(np.argmax(gain))
        if gain[i] <= tol:
            break
        s[i] = -s[i]
        field_ += 2.0 * s[i] * a[:, i]
        flips += 1
    z = CutAssignment.from_spins(s.astype(np.int64))
    return Solution(
        assignment=z,
        cut_value=cut_value(g, z),
        ising_energy=ising_energy(g, z),
        solver="local",
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
        params={"flips": flips},
    )


def sahni_gonzalez(g: Graph, order_seed: int | None = None) -> Solution:
    """Greedy: place nodes one by one (random order from ``order_seed``, identity
    order if None) on the side cutting more weight to nodes already placed."""
    if g.n < 2:
        raise InvalidInstanceError("Sahni-Gonzalez needs at least two nodes")
    t0 = time.perf_counter()
    order = np.arange(g.n) if order_seed is None else make_rng(order_seed).permutation(g.n)
    a = g.dense
    side = np.full(g.n, -1, dtype=np.int8)
    for v in order.tolist():
        row = a[v]
        to_a = float(row[side == 1].sum())
        to_b = float(row[side == 0].sum())
        # joining A cuts the edges to B
        side[v] = 1 if to_b >= to_a else 0
    z = CutAssignment(side)
    return Solution(
        assignment=z,
        cut_value=cut_value(g, z),
        ising_energy=ising_energy(g, z),
        solver="sg",
        seed=order_seed,
        wall_time_s=time.perf_counter() - t0,
    )

"""ADAPT-Clifford MaxCut solver.

The Clifford state is never simulated here. After the first pair ``(k, j)``
is fixed, every active node sits on the side of ``k`` or of ``j`` and the
gradient of an inactive node ``b`` against ``k`` reduces to

    g[b] = -sum_{l in side_k} w[l, b] + sum_{l in side_j} w[l, b],

with the gradient against ``j`` equal to ``-g[b]``. ``g`` is kept up to date
incrementally: placing node ``b*`` touches only its neighbours, so one run
costs O(|E| + n^2) (the argmax scan dominates on sparse graphs).
The tableau replay in :mod:`adapt_clifford.stabilizer` checks all of this.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .cut_energy import CutAssignment, cut_value, ising_energy
from .graph import Graph, InvalidInstanceError, make_rng
from .solution import J_SIDE, K_SIDE, Solution

__all__ = [
    "PartitionState",
    "GradientCache",
    "TieBreakPolicy",
    "LowestIndex",
    "RandomTieBreak",
    "Scripted",
    "init_run",
    "gradient",
    "naive_gradients",
    "step",
    "run_from",
    "run_from_naive",
    "randomized",
    "deterministic",
]

INACTIVE, ON_K, ON_J = 0, 1, 2


# tie-breaking -------------------------------------------------------------


class TieBreakPolicy:
    """Chooses among ``(node, side)`` candidates sharing the largest gradient.

    Candidates arrive sorted by node, ``K_SIDE`` before ``J_SIDE``.
    ``step`` is 1 for the choice of ``j`` and 2..n-1 afterwards.
    """

    lowest = False

    def choose(self, candidates: list[tuple[int, str]], step: int) -> tuple[int, str]:
        raise NotImplementedError


class LowestIndex(TieBreakPolicy):
    """Lowest node index, k-side before j-side."""

    lowest = True

    def choose(self, candidates, step):
        return candidates[0]


class RandomTieBreak(TieBreakPolicy):
    def __init__(self, seed: int | None = None):
        self.rng = make_rng(seed)

    def choose(self, candidates, step):
        return candidates[int(self.rng.integers(len(candidates)))]


class Scripted(TieBreakPolicy):
    """Replays a fixed list of choices, one per step starting at step 1.

    Each scripted choice must be among the tied maximisers; steps beyond the
    script fall back to the lowest-index rule.
    """

    def __init__(self, choices: list[tuple[int, str]]):
        self.choices = [(int(b), str(s)) for b, s in choices]

    def choose(self, candidates, step):
        if step - 1 >= len(self.choices):
            return candidates[0]
        want = self.choices[step - 1]
        if want not in candidates:
            raise ValueError(f"scripted choice {want} at step {step} is not a maximiser: {candidates}")
        return want


DEFAULT_POLICY = LowestIndex()


# state ------------------------------------------------------------------


@dataclass
class PartitionState:
    k: int
    j: int
    label: np.ndarray  # INACTIVE / ON_K / ON_J per node
    step: int = 1

    @property
    def side_k(self) -> set[int]:
        return set(np.flatnonzero(self.label == ON_K).tolist())

    @property
    def side_j(self) -> set[int]:
        return set(np.flatnonzero(self.label == ON_J).tolist())

    @property
    def inactive(self) -> set[int]:
        return set(np.flatnonzero(self.label == INACTIVE).tolist())

    def n_inactive(self) -> int:
        return int(np.count_nonzero(self.label == INACTIVE))


@dataclass
class GradientCache:
    """``g[b]`` = gradient of inactive node b against k (entries of active nodes are stale)."""

    g: np.ndarray

    def __getitem__(self, b: int) -> float:
        return float(self.g[b])


class _CSR:
    __slots__ = ("indptr", "indices", "weights")

    def __init__(self, g: Graph):
        i, j, w = g.edge_arrays
        src = np.concatenate([i, j])
        dst = np.concatenate([j, i])
        ww = np.concatenate([w, w])
        order = np.argsort(src, kind="stable")
        self.indices = dst[order]
        self.weights = ww[order]
        self.indptr = np.zeros(g.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=g.n), out=self.indptr[1:])

    def row(self, v: int):
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.weights[lo:hi]


def _csr(g: Graph) -> _CSR:
    csr = g.__dict__.get("_adapt_csr")
    if csr is None:
        csr = _CSR(g)
        g.__dict__["_adapt_csr"] = csr
    return csr


def _weights_from(g: Graph, v: int) -> np.ndarray:
    row = np.zeros(g.n)
    nb, w = _csr(g).row(v)
    row[nb] = w
    return row


def init_run(g: Graph, k: int, tie_break: TieBreakPolicy = DEFAULT_POLICY):
    """Steps 0 and 1: pick ``j`` maximising ``w[k, j]`` and seed the gradient cache."""
    if g.n < 2:
        raise InvalidInstanceError("ADAPT-Clifford needs at least two nodes")
    if not 0 <= k < g.n:
        raise ValueError(f"start node {k} out of range")
    wk = _weights_from(g, k)
    wk_masked = wk.copy()
    wk_masked[k] = -np.inf
    best = wk_masked.max()
    if tie_break.lowest:
        j = int(np.argmax(wk_masked))
    else:
        tied = [(int(b), J_SIDE) for b in np.flatnonzero(wk_masked == best)]
        j = tie_break.choose(tied, 1)[0]
    label = np.zeros(g.n, dtype=np.int8)
    label[k] = ON_K
    label[j] = ON_J
    cache = GradientCache(_weights_from(g, j) - wk)
    return PartitionState(k=k, j=j, label=label, step=1), cache


def gradient(state: PartitionState, cache: GradientCache, b: int) -> float:
    """Gradient of inactive ``b`` against k; against j it is the negation."""
    if state.label[b] != INACTIVE:
        raise ValueError(f"node {b} is not inactive")
    return float(cache.g[b])


def naive_gradients(g: Graph, state: PartitionState) -> dict[int, float]:
    """Recompute every inactive gradient from the side sets (reference path)."""
    out = {}
    for b in np.flatnonzero(state.label == INACTIVE).tolist():
        total = 0.0
        for l, w in g.adjacency[b]:
            if state.label[l] == ON_K:
                total -= w
            elif state.label[l] == ON_J:
                total += w
        out[b] = total
    return out


def _candidates(gvec: np.ndarray, idx: np.ndarray) -> list[tuple[int, str]]:
    out = []
    for b in idx.tolist():
        v = gvec[b]
        if v >= 0:
            out.append((b, K_SIDE))
        if v <= 0:
            out.append((b, J_SIDE))
    return out


def _select(gvec: np.ndarray, label: np.ndarray, tie_break: TieBreakPolicy, step_no: int):
    score = np.abs(gvec)
    score[label != INACTIVE] = -1.0
    if tie_break.lowest:
        b = int(np.argmax(score))
        return b, (K_SIDE if gvec[b] >= 0 else J_SIDE), float(score[b])
    best = score.max()
    b, side = tie_break.choose(_candidates(gvec, np.flatnonzero(score == best)), step_no)
    return b, side, float(best)


def step(state: PartitionState, cache: GradientCache, g: Graph,
         tie_break: TieBreakPolicy = DEFAULT_POLICY) -> tuple[int, str]:
    """Place the inactive node with the largest ``|g[b]|`` and update the cache."""
    b, side, _ = _select(cache.g, state.label, tie_break, state.step + 1)
    _place(state, cache, g, b, side)
    return b, side


def _place(state, cache, g, b, side):
    nb, w = _csr(g).row(b)
    if side == K_SIDE:
        state.label[b] = ON_K
        cache.g[nb] -= w
    else:
        state.label[b] = ON_J
        cache.g[nb] += w
    state.step += 1


def _finish(g: Graph, state: PartitionState, gates, grads, solver: str, t0: float) -> Solution:
    bits = (state.label == ON_K).astype(np.int8)
    z = CutAssignment(bits)
    return Solution(
        assignment=z,
        cut_value=cut_value(g, z),
        ising_energy=ising_energy(g, z),
        solver=solver,
        start_node=state.k,
        gate_trace=gates,
        gradient_trace=grads,
        wall_time_s=time.perf_counter() - t0,
    )


@numba.njit(cache=True)
def _grow_lowest(label, gvec, indptr, indices, weights):
    """Steps 2..n-1 under the lowest-index rule; mutates ``label`` and ``gvec``."""
    n = label.size
    m = n - 2
    nodes = np.empty(m, dtype=np.int64)
    sides = np.empty(m, dtype=np.int8)
    vals = np.empty(m)
    for r in range(m):
        best = -1.0
        b = -1
        for v in range(n):
            if label[v] == 0:
                a = abs(gvec[v])
                if a > best:
                    best = a
                    b = v
        if gvec[b] >= 0:
            label[b] = 1
            for p in range(indptr[b], indptr[b + 1]):
                gvec[indices[p]] -= weights[p]
            sides[r] = 1
        else:
            label[b] = 2
            for p in range(indptr[b], indptr[b + 1]):
                gvec[indices[p]] += weights[p]
            sides[r] = 2
        nodes[r] = b
        vals[r] = best
    return nodes, sides, vals


def run_from(g: Graph, k: int, tie_break: TieBreakPolicy = DEFAULT_POLICY,
             solver: str = "adapt") -> Solution:
    """One full ADAPT-Clifford run from start node ``k``.

    Readout puts the k-side in A (bit 1) and the j-side in the complement.
    """
    t0 = time.perf_counter()
    state, cache = init_run(g, k, tie_break)
    gates = [(J_SIDE, state.j)]
    grads = [float(_weights_from(g, k)[state.j])]
    csr = _csr(g)
    gvec, label = cache.g, state.label
    if tie_break.lowest:
        nodes, sides, vals = _grow_lowest(label, gvec, csr.indptr, csr.indices, csr.weights)
        gates += [(K_SIDE if sd == ON_K else J_SIDE, b) for b, sd in zip(nodes.tolist(), sides.tolist())]
        grads += vals.tolist()
        state.step = g.n - 1
    else:
        for r in range(2, g.n):
            b, side, val = _select(gvec, label, tie_break, r)
            lo, hi = csr.indptr[b], csr.indptr[b + 1]
            if side == K_SIDE:
                label[b] = ON_K
                gvec[csr.indices[lo:hi]] -= csr.weights[lo:hi]
            else:
                label[b] = ON_J
                gvec[csr.indices[lo:hi]] += csr.weights[lo:hi]
            state.step = r
            gates.append((side, b))
            grads.append(val)
    return _finish(g, state, gates, grads, solver, t0)


def run_from_naive(g: Graph, k: int, tie_break: TieBreakPolicy = DEFAULT_POLICY) -> Solution:
    """Same algorithm with all gradients recomputed from scratch every step."""
    t0 = time.perf_counter()
    state, _ = init_run(g, k, tie_break)
    gates = [(J_SIDE, state.j)]
    grads = [g.weight(k, state.j)]
    for r in range(2, g.n):
        gvec = np.zeros(g.n)
        for b, v in naive_gradients(g, state).items():
            gvec[b] = v
        b, side, val = _select(gvec, state.label, tie_break, r)
        state.label[b] = ON_K if side == K_SIDE else ON_J
        state.step = r
        gates.append((side, b))
        grads.append(val)
    return _finish(g, state, gates, grads, "adapt-naive", t0)


def randomized(g: Graph, seed: int | None = None,
               tie_break: TieBreakPolicy = DEFAULT_POLICY) -> Solution:
    """Single run from a start node drawn uniformly with ``seed``."""
    if g.n < 2:
        raise InvalidInstanceError("ADAPT-Clifford needs at least two nodes")
    k = int(make_rng(seed).integers(g.n))
    sol = run_from(g, k, tie_break, solver="adapt-rand")
    sol.seed = seed
    return sol


def deterministic(g: Graph, tie_break: TieBreakPolicy = DEFAULT_POLICY,
                  workers: int = 1) -> Solution:
    """Best run over all start nodes (lowest energy, then lowest k).

    ``per_start`` on the result lists ``(k, cut_value, ising_energy)`` for
    every start. Starts are independent, so ``workers > 1`` runs them on a
    thread pool; the reduction is order independent.
    """
    if g.n < 2:
        raise InvalidInstanceError("ADAPT-Clifford needs at least two nodes")
    t0 = time.perf_counter()
    if workers > 1 and g.n > 1:
        _csr(g)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda k: run_from(g, k, tie_break), range(g.n)))
    else:
        runs = [run_from(g, k, tie_break) for k in range(g.n)]
    best = min(runs, key=lambda s: (s.ising_energy, s.start_node))
    best.solver = "adapt-det"
    best.per_start = [(s.start_node, s.cut_value, s.ising_energy) for s in runs]
    best.wall_time_s = time.perf_counter() - t0
    return best

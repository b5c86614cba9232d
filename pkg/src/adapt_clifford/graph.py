"""Weighted undirected graphs, random instance families and edge-list I/O.

Randomness: every generator takes a 64-bit seed and builds a
``numpy.random.Generator(PCG64(seed))``. Uniform draws use ``Generator.random``,
normal draws ``Generator.standard_normal`` (ziggurat) and exponential draws
``Generator.standard_exponential`` (ziggurat), so the same (params, seed)
yields the same instance. Per-instance seeds inside a batch come from
:func:`derive_seed`, a BLAKE2b hash of the master seed and the instance key.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "WeightSpec",
    "InvalidInstanceError",
    "EdgeListParseError",
    "derive_seed",
    "make_rng",
    "gen_complete",
    "gen_sk",
    "gen_regular",
    "gen_erdos_renyi",
    "read_edge_list",
    "write_edge_list",
    "format_edge_list",
    "parse_edge_list",
    "total_weight",
]

SEED_MASK = (1 << 64) - 1


class InvalidInstanceError(ValueError):
    """Raised for generator parameters that cannot produce a graph."""


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def derive_seed(master: int, *keys) -> int:
    """Mix ``keys`` into ``master`` and return a 64-bit seed.

    The key tuple is rendered as ``repr`` strings joined by ``"|"`` and hashed
    with BLAKE2b (8-byte digest, little endian). Stable across platforms and
    Python versions.
    """
    payload = "|".join([str(int(master) & SEED_MASK)] + [repr(k) for k in keys])
    digest = hashlib.blake2b(payload.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int | None) -> np.random.Generator:
    if seed is None:
        return np.random.default_rng()
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class WeightSpec:
    """Edge weight distribution.

    kind is one of ``unit``, ``uniform`` (a, b), ``exponential`` (mean),
    ``normal`` (mean, var) and ``normal_sqrt_n`` (N(0,1)/sqrt(n), the SK scaling).
    """

    kind: str = "unit"
    a: float = 0.0
    b: float = 1.0
    mean: float = 0.0
    var: float = 1.0

    KINDS = ("unit", "uniform", "exponential", "normal", "normal_sqrt_n")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        for name in ("a", "b", "mean", "var"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"weight parameter {name} must be finite")
        if self.kind == "uniform" and self.b < self.a:
            raise ValueError("uniform weights need a <= b")
        if self.kind == "exponential" and self.mean <= 0:
            raise ValueError("exponential mean must be positive")
        if self.kind == "normal" and self.var < 0:
            raise ValueError("normal variance must be non-negative")

    @classmethod
    def unit(cls) -> "WeightSpec":
        return cls("unit")

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "WeightSpec":
        return cls("uniform", a=a, b=b)

    @classmethod
    def exponential(cls, mean: float = 1.0) -> "WeightSpec":
        return cls("exponential", mean=mean)

    @classmethod
    def normal(cls, mean: float = 0.0, var: float = 1.0) -> "WeightSpec":
        return cls("normal", mean=mean, var=var)

    @classmethod
    def parse(cls, text: str) -> "WeightSpec":
        """Parse CLI shorthands: ``unit``, ``u01``, ``u11``, ``uniform:a:b``,
        ``exp[:mean]``, ``normal[:mean:var]``."""
        parts = text.strip().lower().split(":")
        head, args = parts[0], [float(p) for p in parts[1:]]
        if head == "unit":
            return cls.unit()
        if head == "u01":
            return cls.uniform(0.0, 1.0)
        if head == "u11":
            return cls.uniform(-1.0, 1.0)
        if head == "uniform":
            return cls.uniform(*args)
        if head in ("exp", "exponential"):
            return cls.exponential(*args)
        if head == "normal":
            return cls.normal(*args)
        raise ValueError(f"cannot parse weight spec {text!r}")

    def sample(self, rng: np.random.Generator, size: int, n: int) -> np.ndarray:
        if self.kind == "unit":
            return np.ones(size)
        if self.kind == "uniform":
            return self.a + (self.b - self.a) * rng.random(size)
        if self.kind == "exponential":
            return self.mean * rng.standard_exponential(size)
        if self.kind == "normal":
            return self.mean + math.sqrt(self.var) * rng.standard_normal(size)
        return rng.standard_normal(size) / math.sqrt(n)


class Graph:
    """Immutable weighted undirected graph on nodes ``0..n-1``.

    Each undirected edge is stored once with ``i < j``; edges are kept sorted
    by ``(i, j)``. Absent edges have weight 0 everywhere in the package.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = ()):
        edges = list(edges)
        if edges:
            i, j, w = (np.asarray(c) for c in zip(*edges))
        else:
            i = j = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        self._init(n, i, j, w)

    @classmethod
    def from_arrays(cls, n: int, i, j, w) -> "Graph":
        g = cls.__new__(cls)
        g._init(n, np.asarray(i), np.asarray(j), np.asarray(w))
        return g

    def _init(self, n, i, j, w):
        n = int(n)
        if n < 1:
            raise InvalidInstanceError("a graph needs at least one node")
        i = i.astype(np.int64)
        j = j.astype(np.int64)
        w = w.astype(float)
        if not (i.shape == j.shape == w.shape and i.ndim == 1):
            raise InvalidInstanceError("edge arrays must be 1-d and equally long")
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        if np.any(lo == hi):
            raise InvalidInstanceError(f"self-loop on node {int(lo[lo == hi][0])}")
        if lo.size and (lo.min() < 0 or hi.max() >= n):
            raise InvalidInstanceError(f"edge index out of range for n={n}")
        if not np.all(np.isfinite(w)):
            raise InvalidInstanceError("edge weights must be finite")
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                k = int(np.argmax(dup))
                raise InvalidInstanceError(f"duplicate edge ({int(lo[k])}, {int(hi[k])})")
        for arr in (lo, hi, w):
            arr.setflags(write=False)
        self.n, self._i, self._j, self._w = n, lo, hi, w

    @classmethod
    def from_matrix(cls, w: Sequence[Sequence[float]] | np.ndarray) -> "Graph":
        w = np.asarray(w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidInstanceError("adjacency matrix must be square")
        if not np.array_equal(w, w.T):
            raise InvalidInstanceError("adjacency matrix must be symmetric")
        iu, ju = np.nonzero(np.triu(w, 1))
        return cls.from_arrays(w.shape[0], iu, ju, w[iu, ju])

    @property
    def m(self) -> int:
        return int(self._w.size)

    @property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._i, self._j, self._w

    @cached_property
    def edges(self) -> tuple[tuple[int, int, float], ...]:
        return tuple(zip(self._i.tolist(), self._j.tolist(), self._w.tolist()))

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per-node ``(neighbor, weight)`` lists."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            adj[i].append((j, w))
            adj[j].append((i, w))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def dense(self) -> np.ndarray:
        """Symmetric ``n x n`` weight matrix, zero where no edge. Read-only."""
        mat = np.zeros((self.n, self.n))
        mat[self._i, self._j] = self._w
        mat[self._j, self._i] = self._w
        mat.setflags(write=False)
        return mat

    def degrees(self) -> np.ndarray:
        return np.bincount(self._i, minlength=self.n) + np.bincount(self._j, minlength=self.n)

    def weight(self, i: int, j: int) -> float:
        return float(self.dense[i, j])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self._i, other._i)
                and np.array_equal(self._j, other._j) and np.array_equal(self._w, other._w))

    def __hash__(self):
        return hash((self.n, self._i.tobytes(), self._j.tobytes(), self._w.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def total_weight(g: Graph) -> float:
    return float(math.fsum(g.edge_arrays[2].tolist()))


# generators -------------------------------------------------------------


def _check_n(n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise InvalidInstanceError(f"need n >= {minimum}, got {n}")


def _as_spec(spec):
    return WeightSpec.parse(spec) if isinstance(spec, str) else spec


def gen_complete(n: int, spec: WeightSpec | str = WeightSpec(), seed: int | None = None) -> Graph:
    _check_n(n)
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    w = _as_spec(spec).sample(rng, iu.size, n)
    return Graph.from_arrays(n, iu, ju, w)


def gen_sk(n: int, seed: int | None = None) -> Graph:
    """Complete graph with couplings N(0,1)/sqrt(n)."""
    return gen_complete(n, WeightSpec("normal_sqrt_n"), seed)


def _pairing_attempt(n: int, k: int, rng: np.random.Generator):
    stubs = np.repeat(np.arange(n), k)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    a = np.minimum(pairs[:, 0], pairs[:, 1])
    b = np.maximum(pairs[:, 0], pairs[:, 1])
    return a, b


def _repair_by_switching(n: int, a: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                         max_sweeps: int = 1000):
    """Remove loops and multi-edges from a pairing with degree-preserving switches."""
    edges = [tuple(e) for e in zip(a.tolist(), b.tolist())]
    for _ in range(max_sweeps):
        counts: dict[tuple[int, int], int] = {}
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
        bad = [idx for idx, (u, v) in enumerate(edges) if u == v or counts[(u, v)] > 1]
        if not bad:
            return edges
        idx = bad[0]
        other = int(rng.integers(len(edges)))
        if other == idx:
            continue
        (u, v), (x, y) = edges[idx], edges[other]
        if rng.random() < 0.5:
            x, y = y, x
        new1 = (min(u, x), max(u, x))
        new2 = (min(v, y), max(v, y))
        if new1[0] == new1[1] or new2[0] == new2[1]:
            continue
        current = set(edges)
        if new1 in current or new2 in current or new1 == new2:
            continue
        edges[idx], edges[other] = new1, new2
    raise InvalidInstanceError("edge-switching repair did not converge")


def gen_regular(n: int, K: int, spec: WeightSpec | str = WeightSpec(), seed: int | None = None,
                max_attempts: int = 200) -> Graph:
    """Random simple K-regular graph via the pairing model.

    Pairings with loops or repeated edges are rejected and redrawn up to
    ``max_attempts`` times; after that the last pairing is repaired by
    random degree-preserving edge switches. For ``K > (n-1)/2`` the
    complement of a random ``(n-1-K)``-regular graph is returned.
    """
    if K < 0 or K >= n or (n * K) % 2:
        raise InvalidInstanceError(f"no simple {K}-regular graph on {n} nodes")
    rng = make_rng(seed)
    if K == 0:
        return Graph(n)
    if 2 * K > n - 1:
        # dense case: complement of a sparse (n-1-K)-regular graph, same distribution
        a, b = _regular_pairs(n, n - 1 - K, rng, max_attempts)
        mask = np.ones((n, n), dtype=bool)
        mask[a, b] = mask[b, a] = False
        a, b = np.nonzero(np.triu(mask, 1))
    else:
        a, b = _regular_pairs(n, K, rng, max_attempts)
    order = np.lexsort((b, a))
    a, b = a[order], b[order]
    w = _as_spec(spec).sample(rng, a.size, n)
    return Graph.from_arrays(n, a, b, w)


def _regular_pairs(n: int, K: int, rng: np.random.Generator, max_attempts: int):
    if K == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    for _ in range(max_attempts):
        a, b = _pairing_attempt(n, K, rng)
        if np.any(a == b):
            continue
        keys = a * n + b
        if np.unique(keys).size == keys.size:
            break
    else:
        if max_attempts < 1:
            a, b = _pairing_attempt(n, K, rng)
        pairs = _repair_by_switching(n, a, b, rng)
        a = np.array([p[0] for p in pairs])
        b = np.array([p[1] for p in pairs])
    return a, b


def gen_erdos_renyi(n: int, p: float, seed: int | None = None) -> Graph:
    """G(n, p) with unit weights."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    _check_n(n, 1)
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_arrays(n, iu[keep], ju[keep], np.ones(int(keep.sum())))


# edge-list files ----------------------------------------------------------


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{i} {j} {w!r}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(lines: Iterable[str]) -> Graph:
    header = None
    edges = []
    seen = set()
    last = 0
    for lineno, raw in enumerate(lines, start=1):
        last = lineno
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise EdgeListParseError(lineno, "header must be 'n m'")
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise EdgeListParseError(lineno, "header must hold two integers") from None
            if header[0] < 1 or header[1] < 0:
                raise EdgeListParseError(lineno, "invalid node or edge count")
            continue
        if len(parts) != 3:
            raise EdgeListParseError(lineno, "edge line must be 'i j w'")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise EdgeListParseError(lineno, "cannot parse edge") from None
        n = header[0]
        if not (0 <= i < j < n):
            raise EdgeListParseError(lineno, f"need 0 <= i < j < {n}, got ({i}, {j})")
        if (i, j) in seen:
            raise EdgeListParseError(lineno, f"duplicate edge ({i}, {j})")
        if not math.isfinite(w):
            raise EdgeListParseError(lineno, "weight must be finite")
        seen.add((i, j))
        edges.append((i, j, w))
    if header is None:
        raise EdgeListParseError(last, "missing header")
    if len(edges) != header[1]:
        raise EdgeListParseError(last, f"header declares {header[1]} edges, found {len(edges)}")
    return Graph(header[0], tuple(edges))


def read_edge_list(path: str | Path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def write_edge_list(g: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))

"""Cut assignments, the MaxCut objective and the Ising energy.

For every graph and assignment ``cut_value = W/2 - ising_energy`` where W is
the total edge weight.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "CutAssignment",
    "UndefinedRatioError",
    "cut_value",
    "ising_energy",
    "sk_energy",
    "approx_ratio",
]


class UndefinedRatioError(ZeroDivisionError):
    pass


class CutAssignment:
    """Bipartition of ``n`` nodes; ``bits[i] == 1`` iff node i is in A."""

    __slots__ = ("bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.array(bits, dtype=np.int8).ravel()
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("cut bits must be 0 or 1")
        arr.setflags(write=False)
        self.bits = arr

    @classmethod
    def from_spins(cls, spins) -> "CutAssignment":
        s = np.asarray(spins)
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("spins must be +1 or -1")
        return cls((s > 0).astype(np.int8))

    @classmethod
    def from_sets(cls, n: int, side_a: Iterable[int]) -> "CutAssignment":
        bits = np.zeros(n, dtype=np.int8)
        bits[list(side_a)] = 1
        return cls(bits)

    @classmethod
    def from_string(cls, text: str) -> "CutAssignment":
        return cls([int(c) for c in text.strip()])

    @property
    def n(self) -> int:
        return int(self.bits.size)

    @property
    def spins(self) -> np.ndarray:
        return 2 * self.bits.astype(np.int64) - 1

    def sets(self) -> tuple[list[int], list[int]]:
        a = np.flatnonzero(self.bits == 1).tolist()
        b = np.flatnonzero(self.bits == 0).tolist()
        return a, b

    def partition(self) -> frozenset[frozenset[int]]:
        """Unordered pair of sides, so complements compare equal."""
        a, b = self.sets()
        return frozenset((frozenset(a), frozenset(b)))

    def complement(self) -> "CutAssignment":
        return CutAssignment(1 - self.bits)

    def same_cut(self, other: "CutAssignment") -> bool:
        return self.n == other.n and (
            np.array_equal(self.bits, other.bits) or np.array_equal(self.bits, 1 - other.bits)
        )

    def to_string(self) -> str:
        return "".join(map(str, self.bits.tolist()))

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, CutAssignment):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self):
        return f"CutAssignment({self.to_string()!r})"


def _bits(g: Graph, z) -> np.ndarray:
    bits = z.bits if isinstance(z, CutAssignment) else np.asarray(z)
    if bits.shape != (g.n,):
        raise ValueError(f"assignment has length {bits.size}, graph has {g.n} nodes")
    return bits


def cut_value(g: Graph, z: CutAssignment | Sequence[int]) -> float:
    """Total weight of edges with endpoints on different sides."""
    bits = _bits(g, z)
    i, j, w = g.edge_arrays
    return float(np.sum(w[bits[i] != bits[j]]))


def ising_energy(g: Graph, z: CutAssignment | Sequence[int]) -> float:
    """``(1/2) * sum_edges w_ij s_i s_j`` with spins ``s = 2z - 1``."""
    bits = _bits(g, z)
    i, j, w = g.edge_arrays
    s = np.where(bits[i] == bits[j], 1.0, -1.0)
    return 0.5 * float(np.sum(w * s))


def sk_energy(g: Graph, z: CutAssignment | Sequence[int]) -> float:
    """``sum_edges w_ij s_i s_j``: the SK Hamiltonian when weights carry 1/sqrt(n)."""
    return 2.0 * ising_energy(g, z)


def approx_ratio(achieved: float, optimum: float) -> float:
    """``achieved / optimum`` for two cut values or two energies."""
    if optimum == 0:
        raise UndefinedRatioError("approximation ratio undefined for a zero optimum")
    return achieved / optimum

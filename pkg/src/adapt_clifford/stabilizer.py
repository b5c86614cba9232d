"""Stabilizer-tableau oracle for ADAPT-Clifford runs.

Replays a run's rotations ``exp(i pi/4 P)`` on a tableau of signed Pauli
generators (plus destabilizers, which make expectation values O(n^2)),
evaluates the full Pauli-expectation gradient and reads the cut off the
ZZ stabilizers. Independent of the combinatorial bookkeeping in
:mod:`adapt_clifford.adapt`.

Paulis use the (x, z) symplectic encoding: (1,0)=X, (0,1)=Z, (1,1)=Y.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .cut_energy import CutAssignment, cut_value
from .graph import Graph
from .solution import J_SIDE, K_SIDE, Solution

__all__ = [
    "PauliString",
    "Tableau",
    "MalformedStateError",
    "init_flipped_plus",
    "apply_rotation",
    "expectation",
    "gradient_full",
    "extract_cut",
    "replay",
    "verify_solution",
]


class MalformedStateError(ValueError):
    pass


@dataclass
class PauliString:
    x: np.ndarray  # bool, length n
    z: np.ndarray
    sign: int = 1

    @property
    def n(self) -> int:
        return int(self.x.size)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, dtype=bool), np.zeros(n, dtype=bool), 1)

    @classmethod
    def from_ops(cls, n: int, ops: dict[int, str], sign: int = 1) -> "PauliString":
        """``ops`` maps qubit -> 'X' | 'Y' | 'Z'; repeated use via :func:`pauli_product`."""
        p = cls.identity(n)
        p.sign = sign
        for q, op in ops.items():
            op = op.upper()
            if op not in "XYZ":
                raise ValueError(f"bad Pauli label {op!r}")
            p.x[q] = op in "XY"
            p.z[q] = op in "ZY"
        return p

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """E.g. ``"-XIIZY"``; ``I`` or ``_`` for identity."""
        sign = 1
        if label[0] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        return cls.from_ops(len(label), {q: c for q, c in enumerate(label) if c not in "I_"}, sign)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def label(self) -> str:
        chars = np.array(["I", "X", "Z", "Y"])[self.x.astype(int) + 2 * self.z.astype(int)]
        return ("-" if self.sign < 0 else "+") + "".join(chars)

    def commutes(self, other: "PauliString") -> bool:
        return not (np.count_nonzero(self.x & other.z) + np.count_nonzero(self.z & other.x)) % 2

    def __repr__(self):
        return f"PauliString({self.label()!r})"


def _phase_exponent(x1, z1, x2, z2) -> np.ndarray:
    """Per-row power of i picked up by (x1,z1)*(x2,z2), summed over qubits.

    Works row-wise on 2-d arrays (Aaronson-Gottesman ``g`` function).
    """
    x1 = x1.astype(np.int64); z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64); z2 = z2.astype(np.int64)
    g = np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )
    return g.sum(axis=-1)


def pauli_product(p: PauliString, q: PauliString) -> tuple[int, PauliString]:
    """Return ``(e, R)`` with ``p*q = i**e * R`` and R carrying sign p.sign*q.sign."""
    e = int(_phase_exponent(p.x, p.z, q.x, q.z)) % 4
    return e, PauliString(p.x ^ q.x, p.z ^ q.z, p.sign * q.sign)


class Tableau:
    """Stabilizer generators (``rows``) with matching destabilizers.

    Row ``i`` of the stabilizer block anticommutes with destabilizer ``i`` only.
    """

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, sign: np.ndarray):
        self.n = n
        self.x = x  # (2n, n) bool: rows 0..n-1 destabilizers, n..2n-1 stabilizers
        self.z = z
        self.sign = sign  # (2n,) int +-1

    @property
    def rows(self) -> list[PauliString]:
        n = self.n
        return [PauliString(self.x[n + i].copy(), self.z[n + i].copy(), int(self.sign[n + i]))
                for i in range(n)]

    def copy(self) -> "Tableau":
        return Tableau(self.n, self.x.copy(), self.z.copy(), self.sign.copy())

    def check_invariants(self) -> None:
        """Assert commuting, independent stabilizers and a valid destabilizer pairing."""
        n = self.n
        sx, sz = self.x[n:].astype(np.int64), self.z[n:].astype(np.int64)
        dx, dz = self.x[:n].astype(np.int64), self.z[:n].astype(np.int64)
        ss = (sx @ sz.T + sz @ sx.T) % 2
        assert not ss.any(), "stabilizer generators do not commute"
        ds = (dx @ sz.T + dz @ sx.T) % 2
        assert np.array_equal(ds, np.eye(n, dtype=np.int64)), "destabilizer pairing broken"
        assert _gf2_rank(np.hstack([self.x[n:], self.z[n:]])) == n, "generators are dependent"


def _gf2_rank(mat: np.ndarray) -> int:
    m = mat.astype(bool).copy()
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = np.flatnonzero(m[rank:, c])
        if piv.size == 0:
            continue
        p = rank + piv[0]
        m[[rank, p]] = m[[p, rank]]
        others = np.flatnonzero(m[:, c])
        others = others[others != rank]
        m[others] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def init_flipped_plus(n: int, k: int) -> Tableau:
    """The product state with X on every qubit and -X on qubit ``k``."""
    if not 0 <= k < n:
        raise ValueError(f"qubit {k} out of range")
    x = np.zeros((2 * n, n), dtype=bool)
    z = np.zeros((2 * n, n), dtype=bool)
    idx = np.arange(n)
    z[idx, idx] = True  # destabilizers Z_l
    x[n + idx, idx] = True  # stabilizers X_l
    sign = np.ones(2 * n, dtype=np.int64)
    sign[n + k] = -1
    return Tableau(n, x, z, sign)


def _check_rotation(p: PauliString) -> None:
    support = np.flatnonzero(p.x | p.z)
    if support.size != 2:
        raise ValueError(f"rotation generator must have weight 2, got {p.label()}")
    kinds = sorted("Y" if p.x[q] and p.z[q] else ("X" if p.x[q] else "Z") for q in support)
    if kinds != ["Y", "Z"]:
        raise ValueError(f"rotation generator must be of the form Z Y, got {p.label()}")


def apply_rotation(t: Tableau, p: PauliString) -> Tableau:
    """Conjugate the state by ``exp(i pi/4 P)``: anticommuting rows Q become ``i P Q``.

    Updates ``t`` in place and returns it.
    """
    _check_rotation(p)
    anti = ((t.x & p.z).sum(axis=1) + (t.z & p.x).sum(axis=1)) % 2 == 1
    if not anti.any():
        return t
    rows = np.flatnonzero(anti)
    e = (1 + _phase_exponent(np.broadcast_to(p.x, (rows.size, t.n)), np.broadcast_to(p.z, (rows.size, t.n)),
                             t.x[rows], t.z[rows])) % 4
    if np.any(e % 2):
        raise AssertionError("rotation produced an imaginary phase")
    t.sign[rows] *= p.sign * np.where(e == 2, -1, 1)
    t.x[rows] ^= p.x
    t.z[rows] ^= p.z
    return t


def rotation_for(n: int, anchor: int, target: int, first: bool = False) -> PauliString:
    """Generator of the rotation placing ``target`` next to ``anchor``.

    The first gate is ``Y_k Z_j`` (anchor k, target j); later gates are
    ``Z_anchor Y_target``.
    """
    if first:
        return PauliString.from_ops(n, {anchor: "Y", target: "Z"})
    return PauliString.from_ops(n, {anchor: "Z", target: "Y"})


def expectation(t: Tableau, p: PauliString) -> int:
    """``<P>`` on the stabilizer state: +1, -1 or 0."""
    n = t.n
    sx, sz = t.x[n:], t.z[n:]
    anti_s = ((sx & p.z).sum(axis=1) + (sz & p.x).sum(axis=1)) % 2
    if anti_s.any():
        return 0
    dx, dz = t.x[:n], t.z[:n]
    coeff = np.flatnonzero(((dx & p.z).sum(axis=1) + (dz & p.x).sum(axis=1)) % 2)
    # P = +- product of the stabilizers whose destabilizer anticommutes with P
    acc = PauliString.identity(n)
    e_total = 0
    for i in coeff.tolist():
        e, acc = pauli_product(acc, PauliString(sx[i], sz[i], int(t.sign[n + i])))
        e_total += e
    if not (np.array_equal(acc.x, p.x) and np.array_equal(acc.z, p.z)):
        raise AssertionError("decomposition over stabilizers failed")
    e_total %= 4
    if e_total % 2:
        raise AssertionError("stabilizer product carries an imaginary phase")
    value = acc.sign * (-1 if e_total == 2 else 1)
    return int(value * p.sign)


def gradient_full(t: Tableau, g: Graph, a: int, b: int) -> float:
    """``-sum_l w[l, b] <Z_l X_b Z_a>`` evaluated on the tableau."""
    total = 0.0
    for l, w in g.adjacency[b]:
        p = PauliString.identity(t.n)
        p.x[b] = True
        p.z[l] ^= True
        p.z[a] ^= True
        total -= w * expectation(t, p)
    return total


def extract_cut(t: Tableau) -> CutAssignment:
    """Read the cut from the signed ZZ generators, anchoring node 0 on side A."""
    n = t.n
    sx, sz, sign = t.x[n:], t.z[n:], t.sign[n:]
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    count = 0
    for r in range(n):
        if sx[r].any():
            continue
        support = np.flatnonzero(sz[r])
        if support.size != 2:
            continue
        u, v = support.tolist()
        nbrs[u].append((v, int(sign[r])))
        nbrs[v].append((u, int(sign[r])))
        count += 1
    if count < n - 1:
        raise MalformedStateError(f"expected {n - 1} ZZ generators, found {count}")
    spin = np.zeros(n, dtype=np.int64)
    spin[0] = 1
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, s in nbrs[u]:
            if spin[v] == 0:
                spin[v] = s * spin[u]
                queue.append(v)
            elif spin[v] != s * spin[u]:
                raise MalformedStateError("inconsistent ZZ signs")
    if np.any(spin == 0):
        raise MalformedStateError("ZZ generators do not connect all qubits")
    return CutAssignment.from_spins(spin)


def replay(n: int, start: int, gate_trace: list[tuple[str, int]], check: bool = False):
    """Apply a run's gates; yields nothing, returns the final tableau and (k, j)."""
    t = init_flipped_plus(n, start)
    if not gate_trace or gate_trace[0][0] != J_SIDE:
        raise ValueError("gate trace must start with the (j, node) entry")
    j = gate_trace[0][1]
    apply_rotation(t, rotation_for(n, start, j, first=True))
    if check:
        t.check_invariants()
    for side, b in gate_trace[1:]:
        anchor = start if side == K_SIDE else j
        apply_rotation(t, rotation_for(n, anchor, b))
        if check:
            t.check_invariants()
    return t, (start, j)


def verify_solution(g: Graph, s: Solution, return_reason: bool = False):
    """Replay ``s.gate_trace`` on a tableau and compare the cut it encodes.

    Returns a bool, or ``(bool, message)`` when ``return_reason`` is set.
    """
    def result(ok, msg):
        return (ok, msg) if return_reason else ok

    if s.start_node is None:
        return result(False, "solution has no start node")
    if len(s.gate_trace) != g.n - 1:
        return result(False, f"gate trace has {len(s.gate_trace)} entries, expected {g.n - 1}")
    if s.assignment.n != g.n:
        return result(False, "assignment length does not match graph")
    try:
        t, _ = replay(g.n, s.start_node, s.gate_trace)
        z = extract_cut(t)
    except (ValueError, IndexError) as exc:
        return result(False, f"replay failed: {exc}")
    if not z.same_cut(s.assignment):
        diff = np.flatnonzero(z.bits != s.assignment.bits)
        if diff.size > g.n / 2:
            diff = np.flatnonzero(z.bits == s.assignment.bits)
        return result(False, f"assignment differs from tableau readout at node {int(diff[0])}")
    if abs(cut_value(g, z) - s.cut_value) > 1e-9 * max(1.0, abs(s.cut_value)):
        return result(False, f"cut value {s.cut_value} does not match replayed {cut_value(g, z)}")
    return result(True, "ok")

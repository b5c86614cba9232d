import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adapt_clifford.cut_energy import (
    CutAssignment,
    UndefinedRatioError,
    approx_ratio,
    cut_value,
    ising_energy,
    sk_energy,
)
from adapt_clifford.graph import Graph, WeightSpec, derive_seed, gen_complete, total_weight

from conftest import make_family, FAMILIES, zero_based


def brute_force_max(g):
    """Independent enumeration over all 2^n assignments with explicit edge loops."""
    best = -np.inf
    for bits in itertools.product((0, 1), repeat=g.n):
        val = sum(w for i, j, w in g.edges if bits[i] != bits[j])
        best = max(best, val)
    return best


def sets_1based(n, side_a):
    return CutAssignment.from_sets(n, [zero_based(v) for v in side_a])


def test_five_node_values(five_node):
    z = sets_1based(5, [1, 3, 4])
    assert cut_value(five_node, z) == 6
    assert brute_force_max(five_node) == 6
    assert ising_energy(five_node, z) == -2.5
    assert cut_value(five_node, np.zeros(5, dtype=int)) == 0


def test_four_node_values(four_node):
    z = sets_1based(4, [1, 2, 4])
    assert cut_value(four_node, z) == 3
    assert brute_force_max(four_node) == 3
    assert ising_energy(four_node, z) == -1.0


def test_single_edge_energy():
    g = Graph(2, [(0, 1, 1.0)])
    assert ising_energy(g, [1, 1]) == 0.5
    assert ising_energy(g, [0, 1]) == -0.5
    assert sk_energy(g, [0, 1]) == -1.0


def test_ratios(five_node):
    assert approx_ratio(6, 6) == 1.0
    z = sets_1based(5, [1, 2, 3])
    assert cut_value(five_node, z) == 4
    assert approx_ratio(cut_value(five_node, z), 6) == pytest.approx(0.6667, abs=1e-4)
    assert approx_ratio(-2.4, -2.5) == pytest.approx(0.96)
    with pytest.raises(UndefinedRatioError):
        approx_ratio(1.0, 0.0)


def test_length_mismatch(five_node):
    with pytest.raises(ValueError):
        cut_value(five_node, [0, 1])
    with pytest.raises(ValueError):
        ising_energy(five_node, CutAssignment([0, 1, 0]))


def test_assignment_conversions():
    z = CutAssignment([1, 0, 0, 1])
    assert z.spins.tolist() == [1, -1, -1, 1]
    assert CutAssignment.from_spins(z.spins) == z
    assert CutAssignment.from_string(z.to_string()) == z
    assert z.sets() == ([0, 3], [1, 2])
    assert z.complement().same_cut(z)
    assert z.partition() == z.complement().partition()
    with pytest.raises(ValueError):
        CutAssignment([0, 2])


def test_identity_1000_pairs():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for idx in range(1000):
        family = FAMILIES[idx % len(FAMILIES)]
        n = int(rng.integers(4, 25))
        if family.startswith("regular"):
            n -= n % 2
        g = make_family(family, n, derive_seed(99, idx))
        z = CutAssignment(rng.integers(0, 2, g.n))
        lhs = cut_value(g, z)
        rhs = total_weight(g) / 2 - ising_energy(g, z)
        worst = max(worst, abs(lhs - rhs))
        assert cut_value(g, z) == cut_value(g, z.complement())
        assert ising_energy(g, z) == ising_energy(g, z.complement())
    assert worst <= 1e-9


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(1, 12),
    seed=st.integers(0, 2**32),
    data=st.data(),
)
def test_identity_property(n, seed, data):
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((n, n)) < 0.6, 1)
    weights = rng.uniform(-2, 2, (n, n)) * mask
    g = Graph.from_matrix(weights + weights.T)
    bits = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    z = CutAssignment(bits)
    assert abs(cut_value(g, z) - (total_weight(g) / 2 - ising_energy(g, z))) <= 1e-9
    assert cut_value(g, z) == cut_value(g, z.complement())
    assert cut_value(g, np.zeros(n, dtype=int)) == 0

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adapt_clifford.graph import (
    EdgeListParseError,
    Graph,
    InvalidInstanceError,
    WeightSpec,
    derive_seed,
    format_edge_list,
    gen_complete,
    gen_erdos_renyi,
    gen_regular,
    gen_sk,
    parse_edge_list,
    read_edge_list,
    total_weight,
    write_edge_list,
)

from conftest import DATA


def test_complete_unit_triangle():
    g = gen_complete(3, WeightSpec.unit(), 0)
    assert g.edges == ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))


def test_complete_is_deterministic_per_seed():
    a = gen_complete(6, WeightSpec.uniform(), 11)
    b = gen_complete(6, WeightSpec.uniform(), 11)
    assert a == b
    assert format_edge_list(a) == format_edge_list(b)
    assert a != gen_complete(6, WeightSpec.uniform(), 12)


def test_complete_u01_mean():
    g = gen_complete(100, WeightSpec.uniform(), 5)
    w = g.edge_arrays[2]
    assert g.m == 4950
    tol = 3 * (1 / math.sqrt(12)) / 10
    assert abs(w.mean() - 0.5) <= tol


def test_complete_rejects_tiny():
    with pytest.raises(InvalidInstanceError):
        gen_complete(1, WeightSpec.uniform(), 0)


def test_exponential_and_normal_weights():
    g = gen_complete(60, WeightSpec.exponential(2.0), 3)
    assert np.all(g.edge_arrays[2] > 0)
    assert abs(g.edge_arrays[2].mean() - 2.0) < 0.2
    g = gen_complete(60, WeightSpec.normal(1.0, 4.0), 3)
    assert abs(g.edge_arrays[2].std() - 2.0) < 0.2


def test_sk_two_nodes_uses_first_normal_draw():
    g = gen_sk(2, 42)
    first = np.random.Generator(np.random.PCG64(42)).standard_normal(1)[0]
    assert g.m == 1
    assert g.edges[0][2] == pytest.approx(first / math.sqrt(2), abs=0)


def test_sk_moments():
    n = 200
    g = gen_sk(n, 9)
    scaled = math.sqrt(n) * g.edge_arrays[2]
    assert 0.8 <= scaled.var() <= 1.2
    m = n * (n - 1) / 2
    assert abs(scaled.mean()) <= 4 / math.sqrt(m)


@pytest.mark.parametrize("seed", range(5))
def test_sk_mean_within_four_sigma(seed):
    n = 100
    scaled = math.sqrt(n) * gen_sk(n, seed).edge_arrays[2]
    assert abs(scaled.mean()) <= 4 / math.sqrt(n * (n - 1) / 2)


def test_regular_k4():
    g = gen_regular(4, 3, WeightSpec.unit(), 1)
    assert g == gen_complete(4, WeightSpec.unit(), 0)


@pytest.mark.parametrize("n,k", [(20, 3), (100, 8), (30, 5 + 1), (12, 11), (50, 3)])
def test_regular_degrees(n, k):
    g = gen_regular(n, k, WeightSpec.uniform(), 3)
    assert g.m == n * k // 2
    assert np.all(g.degrees() == k)


def test_regular_weighted_count():
    g = gen_regular(100, 8, WeightSpec.uniform(), 4)
    assert g.m == 400
    assert np.all(g.degrees() == 8)
    assert np.all((g.edge_arrays[2] >= 0) & (g.edge_arrays[2] < 1))


@pytest.mark.parametrize("n,k", [(5, 3), (4, 4), (3, 5)])
def test_regular_invalid(n, k):
    with pytest.raises(InvalidInstanceError):
        gen_regular(n, k, WeightSpec.unit(), 0)


def test_regular_repair_path():
    # zero pairing attempts sends every draw through the switching repair
    for seed in range(20):
        g = gen_regular(30, 6, WeightSpec.unit(), seed, max_attempts=0)
        assert np.all(g.degrees() == 6)


def test_regular_dense_uses_complement():
    assert gen_regular(6, 5, WeightSpec.unit(), 1).m == 15
    for seed in range(10):
        g = gen_regular(14, 11, WeightSpec.unit(), seed)
        assert np.all(g.degrees() == 11)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(4, 40), k=st.integers(1, 6), seed=st.integers(0, 2**64 - 1))
def test_regular_property(n, k, seed):
    if k >= n or (n * k) % 2:
        with pytest.raises(InvalidInstanceError):
            gen_regular(n, k, WeightSpec.unit(), seed)
        return
    g = gen_regular(n, k, WeightSpec.unit(), seed)
    assert np.all(g.degrees() == k)
    assert g == gen_regular(n, k, WeightSpec.unit(), seed)


def test_erdos_renyi_extremes():
    assert gen_erdos_renyi(10, 0.0, 1).m == 0
    full = gen_erdos_renyi(10, 1.0, 1)
    assert full.m == 45 and np.all(full.edge_arrays[2] == 1.0)


def test_erdos_renyi_count():
    g = gen_erdos_renyi(120, 0.5, 2)
    sigma = math.sqrt(7140 * 0.25)
    assert abs(g.m - 3570) <= 4 * sigma


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_erdos_renyi_bad_p(p):
    with pytest.raises(ValueError):
        gen_erdos_renyi(10, p, 0)


def test_graph_invariants():
    with pytest.raises(InvalidInstanceError):
        Graph(3, [(0, 0, 1.0)])
    with pytest.raises(InvalidInstanceError):
        Graph(3, [(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(InvalidInstanceError):
        Graph(3, [(0, 3, 1.0)])
    with pytest.raises(InvalidInstanceError):
        Graph(3, [(0, 1, float("nan"))])
    g = Graph(3, [(2, 0, 0.5)])
    assert g.edges == ((0, 2, 0.5),)


def test_total_weight():
    assert total_weight(Graph(4)) == 0
    assert total_weight(Graph(2, [(0, 1, 0.3)])) == 0.3
    assert total_weight(read_edge_list(DATA / "five_node.txt")) == 7


def test_read_small_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("3 2\n0 1 1.0\n1 2 0.5\n")
    g = read_edge_list(p)
    assert g.n == 3 and g.edges == ((0, 1, 1.0), (1, 2, 0.5))


def test_read_app_e_file(five_node):
    g = read_edge_list(DATA / "five_node.txt")
    assert g == five_node
    assert g.m == 7 and np.all(g.edge_arrays[2] == 1.0)


def test_round_trip_full_precision(tmp_path):
    g = gen_sk(12, 3)
    p = tmp_path / "sk.txt"
    write_edge_list(g, p)
    assert read_edge_list(p) == g
    text = p.read_text()
    q = tmp_path / "again.txt"
    write_edge_list(read_edge_list(p), q)
    assert q.read_text() == text


@pytest.mark.parametrize(
    "text,line",
    [
        ("3 2\n0 1 1.0\n1 x 0.5\n", 3),
        ("3 1\n0 3 1.0\n", 2),
        ("3 2\n0 1 1.0\n0 1 2.0\n", 3),
        ("3 1\n1 0 1.0\n", 2),
        ("# comment\n3\n", 2),
        ("3 2\n0 1 1.0\n", 2),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(EdgeListParseError) as info:
        parse_edge_list(text.splitlines())
    assert info.value.lineno == line
    assert f"line {line}" in str(info.value)


def test_derive_seed_stable():
    assert derive_seed(1, "sk", 10, 0) == derive_seed(1, "sk", 10, 0)
    assert derive_seed(1, "sk", 10, 0) != derive_seed(1, "sk", 10, 1)
    assert 0 <= derive_seed(2**64 - 1, "x") < 2**64


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec.exponential(0.0)
    with pytest.raises(ValueError):
        WeightSpec.normal(0.0, -1.0)
    with pytest.raises(ValueError):
        WeightSpec("uniform", a=float("inf"))
    assert WeightSpec.parse("u11") == WeightSpec.uniform(-1, 1)
    assert WeightSpec.parse("exp:2") == WeightSpec.exponential(2.0)

import os
from pathlib import Path

import numpy as np
import pytest

from adapt_clifford.graph import (
    Graph,
    WeightSpec,
    derive_seed,
    gen_complete,
    gen_erdos_renyi,
    gen_regular,
    gen_sk,
    read_edge_list,
)

DATA = Path(__file__).parent / "data"

FIVE_NODE = [
    [0, 1, 0, 0, 1],
    [1, 0, 1, 1, 0],
    [0, 1, 0, 1, 1],
    [0, 1, 1, 0, 1],
    [1, 0, 1, 1, 0],
]
FOUR_NODE = [
    [0, 1, 1, 0],
    [1, 0, 1, 0],
    [1, 1, 0, 1],
    [0, 0, 1, 0],
]

FAMILIES = ["complete-u01", "sk", "regular3-unit", "regular3-u01", "er-0.5", "complete-signed", "complete-unit"]


def make_family(family: str, n: int, seed: int) -> Graph:
    if family == "complete-u01":
        return gen_complete(n, WeightSpec.uniform(), seed)
    if family == "sk":
        return gen_sk(n, seed)
    if family == "regular3-unit":
        return gen_regular(n, 3, WeightSpec.unit(), seed)
    if family == "regular3-u01":
        return gen_regular(n, 3, WeightSpec.uniform(), seed)
    if family == "er-0.5":
        return gen_erdos_renyi(n, 0.5, seed)
    if family == "complete-signed":
        return gen_complete(n, WeightSpec.uniform(-1, 1), seed)
    if family == "complete-unit":
        return gen_complete(n, WeightSpec.unit(), seed)
    raise ValueError(family)


def mixed_corpus(count: int, n_min: int, n_max: int, master: int):
    """Deterministic list of (family, graph) pairs cycling through FAMILIES."""
    rng = np.random.default_rng(master)
    out = []
    for idx in range(count):
        family = FAMILIES[idx % len(FAMILIES)]
        n = int(rng.integers(n_min, n_max + 1))
        if family.startswith("regular"):
            # 3-regular graphs need an even node count of at least 4
            n = max(4, n - (n % 2))
        out.append((family, make_family(family, n, derive_seed(master, family, idx))))
    return out


@pytest.fixture
def five_node() -> Graph:
    return Graph.from_matrix(FIVE_NODE)


@pytest.fixture
def four_node() -> Graph:
    return Graph.from_matrix(FOUR_NODE)


def zero_based(node: int) -> int:
    """1-based node label from the worked examples to a 0-based index."""
    return node - 1


def extended_enabled() -> bool:
    return os.environ.get("ADAPT_CLIFFORD_EXTENDED", "") not in ("", "0")


# acceptance reporting ---------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

from pathlib import Path

import pytest
from hypothesis import strategies as st

from cvn_rigidity.freegroup import FreeMap, Word
from cvn_rigidity.graph import Graph
from cvn_rigidity.outerspace import MarkedMetricGraph

DATA = Path(__file__).resolve().parent.parent / "data"


def letters(rank: int):
    return st.integers(1, rank).flatmap(lambda i: st.sampled_from([i, -i]))


def raw_words(rank: int = 2, max_size: int = 20):
    return st.lists(letters(rank), max_size=max_size).map(Word)


def nielsen_move(rank: int):
    """A random elementary automorphism as (images, inverse images)."""

    def build(args):
        kind, i, j, side = args
        if i == j:
            j = (i + 1) % rank
        ims = [Word.generator(k) for k in range(rank)]
        inv = list(ims)
        a_i, a_j = Word.generator(i), Word.generator(j)
        if kind == "invert":
            ims[i] = inv[i] = a_i.inverse()
        elif kind == "swap":
            ims[i], ims[j] = a_j, a_i
            inv[i], inv[j] = a_j, a_i
        elif side == 0:
            ims[i], inv[i] = a_i * a_j, a_i * a_j.inverse()
        else:
            ims[i], inv[i] = a_j * a_i, a_j.inverse() * a_i
        return FreeMap(ims, inv)

    return st.tuples(
        st.sampled_from(["invert", "swap", "transvect", "transvect"]),
        st.integers(0, rank - 1),
        st.integers(0, rank - 1),
        st.integers(0, 1),
    ).map(build)


def automorphisms(rank: int = 2, max_moves: int = 5):
    def compose(moves):
        phi = FreeMap.identity(rank)
        for m in moves:
            phi = phi.compose(m)
        return phi

    return st.lists(nielsen_move(rank), min_size=1, max_size=max_moves).map(compose)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fib() -> FreeMap:
    return FreeMap.parse(["a b", "a"], ["b", "b- a"])


@pytest.fixture(scope="session")
def neg() -> FreeMap:
    return FreeMap.parse(["a", "b a"], ["a", "b a-"])


@pytest.fixture(scope="session")
def barbell_graph() -> Graph:
    return Graph.from_edges(2, [(0, 0), (1, 1), (0, 1)], ["x", "y", "e"])


@pytest.fixture(scope="session")
def barbell(barbell_graph) -> MarkedMetricGraph:
    g = barbell_graph
    return MarkedMetricGraph(g, [g.parse_path("x"), g.parse_path("e y e-")], [1, 1, 1], name="barbell")

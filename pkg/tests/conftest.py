from pathlib import Path

import pytest
from hypothesis import strategies as st

from grsc.corpus import gen_figure1
from grsc.graph_core import Alphabet, LabelledGraph, is_reduced_labelling
from grsc.pieces import PieceIndex

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def figure1():
    return gen_figure1()


@pytest.fixture(scope="session")
def figure1_index(figure1):
    return PieceIndex(figure1)


@st.composite
def reduced_graphs(draw, max_vertices: int = 6, max_edges: int = 8, letters: int = 3):
    """Small labelled graphs whose labelling is reduced."""
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(0, max_edges))
    alphabet = Alphabet(tuple("abcdefgh"[:letters]))
    edges = []
    used_out, used_in = set(), set()
    for _ in range(m):
        s = draw(st.integers(0, n - 1))
        t = draw(st.integers(0, n - 1))
        x = draw(st.integers(0, letters - 1))
        if (s, x) in used_out or (t, x) in used_in:
            continue
        used_out.add((s, x))
        used_in.add((t, x))
        edges.append((s, t, x))
    g = LabelledGraph(alphabet, n, edges)
    assert is_reduced_labelling(g)[0]
    return g


@st.composite
def words(draw, rank: int = 3, max_len: int = 8):
    return tuple(draw(st.lists(st.tuples(st.integers(0, rank - 1), st.sampled_from((1, -1))), max_size=max_len)))

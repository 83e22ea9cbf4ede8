"""Hypothesis strategies for small graphs and probing schemes."""
from itertools import combinations

from hypothesis import strategies as st

from bntomo.graph import Network


@st.composite
def networks(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Network.from_edges(n, chosen)


@st.composite
def schemes(draw, min_n=3, max_n=8):
    """(network, S, T) with disjoint non-empty S and T."""
    g = draw(networks(min_n, max_n))
    perm = draw(st.permutations(range(g.vertex_count)))
    a = draw(st.integers(1, g.vertex_count - 1))
    b = draw(st.integers(1, g.vertex_count - a))
    return g, frozenset(perm[:a]), frozenset(perm[a:a + b])

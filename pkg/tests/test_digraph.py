import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orrforge.digraph import (ConnectionSet, Digraph, cayley, components, induced_subdigraph,
                              is_connected_as_cayley, is_oriented, load_digraph,
                              mutual_inneighbours, weakly_connected)
from orrforge.errors import ArgumentError, ParseError
from orrforge.groups import abelian, cyclic, dihedral, quaternion8

GROUPS = [cyclic(7), dihedral(4), quaternion8(), abelian([4, 2])]


@st.composite
def group_and_set(draw):
    G = draw(st.sampled_from(GROUPS))
    S = draw(st.sets(st.integers(1, G.order - 1), max_size=G.order - 1))
    return G, S


def test_arc_convention():
    G = dihedral(3)
    s = G.generators["t"]
    D = cayley(G, [s])
    for x in range(G.order):
        assert D.has_arc(x, G.mul(s, x))
        assert D.has_arc(x, G.mul(x, s)) == (G.mul(s, x) == G.mul(x, s))


def test_connection_set_flags():
    G = cyclic(6)
    S = ConnectionSet(G, [1, 2])
    assert S.antisymmetric and not S.inverse_closed and S.generates
    assert is_oriented(S) and is_connected_as_cayley(S)
    T = ConnectionSet(G, [2, 4])
    assert T.inverse_closed and not T.antisymmetric and not T.generates
    assert ConnectionSet(G, [3]).antisymmetric is False  # involution
    assert ConnectionSet(G, [0]).contains_identity
    with pytest.raises(ArgumentError):
        ConnectionSet(G, [6])
    assert ConnectionSet(G, [2, 1, 2]).members == (1, 2)


@given(group_and_set())
def test_right_translations_are_automorphisms(gs):
    G, S = gs
    D = cayley(G, S)
    for g in range(G.order):
        assert D.is_automorphism(G.table[:, g])
    assert (D.out_degree() == len(S)).all() and (D.in_degree() == len(S)).all()
    assert D.num_arcs == G.order * len(S)
    assert D.has_digon() == (not ConnectionSet(G, S).antisymmetric)


@given(group_and_set())
def test_components_are_cosets(gs):
    G, S = gs
    D = cayley(G, S)
    H = G.closure(S)
    comps = components(D)
    assert len(comps) == G.order // len(H)
    assert sorted(comps[0]) == sorted(H)
    assert weakly_connected(D) == G.generates(S)


def test_induced_subdigraph_labels():
    G = cyclic(8)
    D = cayley(G, [1, 3])
    sub = induced_subdigraph(D, [1, 2, 4, 5])
    assert sub.labels == [1, 2, 4, 5]
    arcs = {(sub.labels[u], sub.labels[v]) for u, v in sub.arcs().tolist()}
    assert arcs == {(1, 2), (1, 4), (2, 5), (4, 5)}


def test_mutual_inneighbours():
    G = cyclic(8)
    D = cayley(G, [1, 2, 3])
    # w -> 5 and w -> 6 with labels in {1, 2, 3}
    assert mutual_inneighbours(D, 5, 6, [1, 2, 3]) == frozenset({3, 4})
    assert mutual_inneighbours(D, 5, 6, [1]) == frozenset()
    with pytest.raises(ArgumentError):
        mutual_inneighbours(D, 5, 5, [1])


def test_edge_list_round_trip():
    D = cayley(quaternion8(), [2, 4])
    E = load_digraph(D.to_edges())
    assert E.n == 8 and np.array_equal(E.adjacency, D.adjacency)
    assert "0 -> " in D.to_dot()


@pytest.mark.parametrize("text", ["", "3", "3 1\n0 1 2", "3 1\n0 x", "3 2\n0 1"])
def test_edge_list_errors(text):
    with pytest.raises((ArgumentError, ParseError)):
        load_digraph(text)


def test_digraph_range_check():
    with pytest.raises(ArgumentError):
        Digraph(3, [(0, 3)])
    D = Digraph(3, [(0, 1), (0, 1), (1, 2)])
    assert D.num_arcs == 2

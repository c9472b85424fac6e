from itertools import islice

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import DiGraphMatcher

from orrforge.autengine import (OrderedPartition, automorphism_group, cycle_notation,
                                fixed_points_of_stabiliser, refine, stabiliser_generators,
                                stabiliser_is_trivial)
from orrforge.digraph import Digraph, cayley
from orrforge.errors import ArgumentError, ResourceError, SearchTimeout
from orrforge.groups import cyclic, dihedral, elementary_abelian, quaternion8


def nx_automorphisms(D, limit=None):
    g = nx.DiGraph()
    g.add_nodes_from(range(D.n))
    g.add_edges_from(map(tuple, D.arcs().tolist()))
    it = islice(DiGraphMatcher(g, g).isomorphisms_iter(), limit)
    return [tuple(m[v] for v in range(D.n)) for m in it]


# |Aut| counted with networkx's VF2 matcher and frozen here.
ORACLE_COUNTS = [
    (cyclic(5), [1, 2], 5),
    (cyclic(5), [1], 5),
    (cyclic(6), [1, 2], 6),
    (cyclic(7), [1, 2, 4], 21),
    (quaternion8(), [2, 4], 16),
    (dihedral(4), [1, 4], 8),
    (elementary_abelian(3), list(range(1, 8)), 40320),
]


@pytest.mark.parametrize("G, S, count", ORACLE_COUNTS, ids=lambda x: getattr(x, "name", None))
def test_automorphism_group_order(G, S, count):
    D = cayley(G, S)
    A = automorphism_group(D)
    assert A.order == count
    assert all(D.is_automorphism(g) for g in A.generators)
    assert stabiliser_is_trivial(D).trivial == (count == G.order)


@st.composite
def small_digraphs(draw):
    n = draw(st.integers(1, 8))
    arcs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                        .filter(lambda a: a[0] != a[1]), max_size=n * 3))
    return Digraph(n, sorted(arcs))


@given(small_digraphs(), st.data())
def test_matches_networkx(D, data):
    auts = nx_automorphisms(D)
    assert automorphism_group(D).order == len(auts)
    base = data.draw(st.integers(0, D.n - 1))
    stab = [p for p in auts if p[base] == base]
    rep = stabiliser_is_trivial(D, base)
    assert rep.trivial == (len(stab) == 1)
    if not rep.trivial:
        assert tuple(rep.witness) in set(stab)
        assert rep.witness[base] == base
    assert stabiliser_generators(D, base).order == len(stab)
    fixed = {v for v in range(D.n) if all(p[v] == v for p in stab)}
    assert fixed_points_of_stabiliser(D, base) == fixed


@given(small_digraphs())
def test_refinement_is_equitable_and_invariant(D):
    pi = refine(D, OrderedPartition.unit(D.n))
    cells = pi.cells
    adj = D.adjacency.astype(int)
    for cell in cells:
        for other in cells:
            outs = {int(adj[v][other].sum()) for v in cell}
            ins = {int(adj[:, v][other].sum()) for v in cell}
            assert len(outs) == 1 and len(ins) == 1
    for p in nx_automorphisms(D, limit=20):
        assert all(pi.colour[v] == pi.colour[p[v]] for v in range(D.n))


def test_partition_helpers():
    pi = OrderedPartition.from_cells(4, [[2, 3], [0], [1]])
    assert pi.cells == [[2, 3], [0], [1]] and not pi.discrete
    assert len(pi.individualise(3)) == 4 and pi.individualise(3).discrete
    with pytest.raises(ArgumentError):
        OrderedPartition.from_cells(3, [[0, 1]])


def test_cycle_notation():
    assert cycle_notation([0, 1, 2]) == "()"
    assert cycle_notation([1, 0, 3, 4, 2]) == "(0 1)(2 3 4)"


def test_witness_for_non_orr():
    G = cyclic(6)
    D = cayley(G, [1, 5])
    rep = stabiliser_is_trivial(D)
    assert not rep.trivial
    assert D.is_automorphism(rep.witness) and rep.witness[0] == 0
    assert rep.cycles() != "()"


def test_arguments_and_limits():
    D = cayley(cyclic(4), [1])
    with pytest.raises(ArgumentError):
        stabiliser_is_trivial(D, base=4)
    with pytest.raises(ArgumentError):
        stabiliser_is_trivial(Digraph(0))
    big = cayley(cyclic(600), [1, 2])
    with pytest.raises(ResourceError):
        automorphism_group(big)
    assert stabiliser_generators(big, 0, limit=None).order == 1


def test_timeout_raises():
    # the complete digraph on C2^6 needs branch nodes, so a zero budget must trip
    G = elementary_abelian(6)
    D = cayley(G, range(1, 64))
    with pytest.raises(SearchTimeout):
        stabiliser_is_trivial(D, timeout=0)
    with pytest.raises(SearchTimeout):
        automorphism_group(D, timeout=0)


def test_random_regular_digraph_agrees_on_larger_instance():
    rng = np.random.default_rng(5)
    G = dihedral(12)
    S = sorted(rng.choice(np.arange(1, 24), size=4, replace=False).tolist())
    D = cayley(G, S)
    assert automorphism_group(D).order == len(nx_automorphisms(D))

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orrforge.errors import ArgumentError, ValidationError
from orrforge.groups import (F2Span, FiniteGroup, HomSearch, abelian, central_product_D4D4, cyclic,
                             decompose_involution_module, dihedral, direct_product,
                             elementary_abelian, elementary_abelian_coordinates, from_generators,
                             generalized_dihedral, half_inversion_set, invariant_factor_decomposition,
                             is_generalized_dihedral, is_isomorphic, permutation_group, quaternion8,
                             quotient, subgroup_as_group)

SMALL = [cyclic(6), dihedral(5), quaternion8(), abelian([4, 2]), elementary_abelian(3),
         permutation_group([(1, 2, 0, 3), (1, 0, 2, 3), (0, 1, 3, 2)])]


def test_bad_tables_rejected():
    with pytest.raises(ValidationError):
        FiniteGroup([[1, 0], [0, 1]])
    with pytest.raises(ValidationError):
        FiniteGroup([[0, 1, 2], [1, 1, 0], [2, 0, 1]])
    # Latin square with identity 0 that is not associative
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(ValidationError):
        FiniteGroup(loop)


def test_conventions():
    D = dihedral(4)
    r, t = D.generators["a"], D.generators["t"]
    assert D.conj(r, t) == D.inv[r]
    # [a, b] = a^-1 b^-1 a b
    assert D.commutator(r, t) == D.prod([D.inv[r], D.inv[t], r, t])
    assert D.conj(r, t) == D.prod([D.inv[t], r, t])
    assert D.commutator(r, t) == D.power(r, 2)


@pytest.mark.parametrize("G", SMALL, ids=lambda G: G.name)
def test_basic_structure(G):
    n = G.order
    assert all(G.mul(g, G.inv[g]) == 0 for g in range(n))
    assert all(G.power(g, int(G.orders[g])) == 0 for g in range(n))
    assert G.generates(G.generating_tuple())
    Z = G.center()
    assert G.is_subgroup(Z) and G.is_normal(Z)
    assert G.is_abelian() == (len(Z) == n)


def test_named_groups():
    Q = quaternion8()
    assert Q.involutions() == [1]
    assert sorted(Q.center()) == [0, 1]
    assert dihedral(6).order == 12 and not dihedral(6).is_abelian()
    assert abelian([4, 2, 2]).exponent() == 4
    G = central_product_D4D4()
    assert G.order == 32 and len(G.center()) == 2
    assert (G.orders <= 4).all()


@given(st.sampled_from(SMALL), st.data())
def test_associativity_and_power_laws(G, data):
    a, b, c = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    k = data.draw(st.integers(-10, 10))
    m = data.draw(st.integers(-10, 10))
    assert G.mul(G.power(a, k), G.power(a, m)) == G.power(a, k + m)
    assert G.conj(G.mul(a, b), c) == G.mul(G.conj(a, c), G.conj(b, c))


def test_from_generators_and_permutation_group():
    G, elems = from_generators(0, [1], lambda x, y: (x + y) % 7, names=["g"])
    assert G.order == 7 and G.generators == {"g": 1}
    assert elems[G.generators["g"]] == 1
    S4 = permutation_group([(1, 2, 3, 0), (1, 0, 2, 3)])
    assert S4.order == 24
    with pytest.raises(ArgumentError):
        from_generators(0, [1], lambda x, y: x + y, limit=10)


def test_direct_product_indexing():
    G = direct_product(cyclic(3), cyclic(4))
    assert G.order == 12 and G.is_abelian()
    assert G.mul(1 * 4 + 3, 2 * 4 + 2) == 0 * 4 + 1


def test_generalized_dihedral_detection():
    ok, (A, tau) = is_generalized_dihedral(dihedral(6))
    assert ok and len(A) == 6 and dihedral(6).orders[tau] == 2
    assert is_generalized_dihedral(elementary_abelian(3))[0]
    assert is_generalized_dihedral(generalized_dihedral(abelian([4, 2])))[0]
    assert not is_generalized_dihedral(quaternion8())[0]
    assert not is_generalized_dihedral(abelian([4, 2]))[0]
    assert not is_generalized_dihedral(cyclic(5))[0]
    with pytest.raises(ArgumentError):
        generalized_dihedral(quaternion8())


def test_quotient_and_subgroup():
    G = abelian([4, 2])
    sq = G.power(G.generators["a1"], 2)
    Q, coset = quotient(G, [0, sq])
    assert Q.order == 4 and (Q.orders <= 2).all()
    assert coset[sq] == 0
    D = dihedral(4)
    with pytest.raises(ArgumentError):
        quotient(D, [0, D.generators["t"]])
    H, emb = subgroup_as_group(D, D.closure([D.generators["a"]]))
    assert H.order == 4 and is_isomorphic(H, cyclic(4))[0]
    assert list(emb) == sorted(D.closure([D.generators["a"]]))


def test_isomorphism():
    ok, phi = is_isomorphic(abelian([2, 3]), cyclic(6))
    assert ok
    G, H = abelian([2, 3]), cyclic(6)
    for a in range(6):
        for b in range(6):
            assert phi[G.mul(a, b)] == H.mul(int(phi[a]), int(phi[b]))
    assert not is_isomorphic(dihedral(4), quaternion8())[0]
    assert not is_isomorphic(abelian([4, 4]), abelian([8, 2]))[0]
    assert not is_isomorphic(cyclic(4), cyclic(5))[0]


def test_homsearch_counts_automorphisms():
    # |Aut(C2^3)| = 168 and |Aut(Q8)| = 24
    G = elementary_abelian(3)
    assert sum(1 for _ in HomSearch(G, G).search()) == 168
    Q = quaternion8()
    assert sum(1 for _ in HomSearch(Q, Q).search()) == 24


def test_catalog_pairwise_non_isomorphic(catalog):
    groups = list(catalog.values())
    for i, G in enumerate(groups):
        for H in groups[i + 1:]:
            if G.order == H.order:
                assert not is_isomorphic(G, H)[0], (G.name, H.name)


@pytest.mark.parametrize("orders", [[8], [4, 2], [4, 4, 2], [2, 2, 2], [3, 3], [6, 2]])
def test_invariant_factors(orders):
    A = abelian(orders)
    facs = invariant_factor_decomposition(A)
    os_ = [m for _, m in facs]
    assert all(os_[i + 1] and os_[i] % os_[i + 1] == 0 for i in range(len(os_) - 1))
    assert np.prod(os_) == A.order
    assert A.generates([g for g, _ in facs])
    assert all(A.orders[g] == m for g, m in facs)


def test_f2span():
    sp = F2Span()
    assert sp.add(0b011) and sp.add(0b110)
    assert not sp.add(0b101)
    assert 0b101 in sp and 0b001 not in sp
    assert sp.rank == 2


def test_involution_module_decomposition():
    V = elementary_abelian(4)
    swap = np.array([((v & 1) << 1) | ((v >> 1) & 1) | (v & 12) for v in range(16)])
    pairs, fixed = decompose_involution_module(V, range(16), swap)
    assert len(pairs) == 1 and len(fixed) == 2
    for v, w in pairs:
        assert swap[v] == w
    basis, coord = elementary_abelian_coordinates(V, range(16))
    assert len(basis) == 4 and len(coord) == 16


def test_half_inversion():
    D = dihedral(4)
    t = D.generators["t"]
    N = D.closure([D.generators["a"]])
    H, frac = half_inversion_set(D, N, D.conjugation_map(t))
    assert H == N and frac == 1
    G = abelian([4, 2])
    ident = np.arange(8)
    H, frac = half_inversion_set(G, range(8), ident)
    assert frac == Fraction(len(G.involutions()) + 1, 8)
    with pytest.raises(ValidationError):
        half_inversion_set(G, range(8), ident[::-1])
    with pytest.raises(ValidationError):
        half_inversion_set(G, range(8), np.zeros(8, dtype=int))

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from orrforge.permgroup import (MaskMapper, MinimalImage, StabChain, compose, inverse, mask_of,
                                points_of)


def perms(n):
    return st.permutations(list(range(n))).map(tuple)


@st.composite
def perm_groups(draw):
    n = draw(st.integers(2, 9))
    gens = draw(st.lists(perms(n), min_size=1, max_size=3))
    return n, gens


def test_compose_order():
    p, q = (1, 2, 0), (1, 0, 2)
    # p then q: 0 -> 1 -> 0
    assert compose(p, q) == (0, 2, 1)
    assert compose(p, inverse(p)) == (0, 1, 2)


@given(perm_groups())
def test_order_matches_sympy(ng):
    n, gens = ng
    chain = StabChain(n, gens)
    oracle = PermutationGroup([Permutation(list(g)) for g in gens])
    assert chain.order == oracle.order()
    elems = set(chain.elements())
    assert len(elems) == chain.order
    assert all(chain.contains(g) for g in gens)


@given(perm_groups(), st.data())
def test_membership(ng, data):
    n, gens = ng
    chain = StabChain(n, gens)
    oracle = PermutationGroup([Permutation(list(g)) for g in gens])
    x = data.draw(perms(n))
    assert chain.contains(x) == oracle.contains(Permutation(list(x)))


def test_custom_base():
    chain = StabChain(4, [(1, 2, 3, 0)], base=[2, 0])
    assert chain.order == 4
    with pytest.raises(ValueError):
        MinimalImage(chain)


@given(st.integers(0, (1 << 12) - 1), perms(12))
def test_mask_mapper(mask, p):
    img = MaskMapper(p)(mask)
    assert sorted(points_of(img)) == sorted(p[x] for x in points_of(mask))
    assert mask_of(points_of(mask)) == mask


@given(perm_groups(), st.data())
def test_minimal_image_brute_force(ng, data):
    n, gens = ng
    chain = StabChain(n, gens)
    mi = MinimalImage(chain)
    pts = data.draw(st.sets(st.integers(0, n - 1)))
    images = {tuple(sorted(g[x] for x in pts)) for g in chain.elements()}
    best = min(images)
    assert sorted(points_of(mi.image(mask_of(pts)))) == list(best)
    assert mi.is_minimal(mask_of(pts)) == (tuple(sorted(pts)) == best)


def test_minimal_image_dihedral_exhaustive():
    # D8 acting on the 8 vertices of an octagon: every mask against brute force
    r = tuple((i + 1) % 8 for i in range(8))
    s = tuple((-i) % 8 for i in range(8))
    chain = StabChain(8, [r, s])
    assert chain.order == 16
    mi = MinimalImage(chain)
    elems = list(chain.elements())
    for mask in range(256):
        pts = points_of(mask)
        best = min(tuple(sorted(g[x] for x in pts)) for g in elems)
        assert points_of(mi.image(mask)) == list(best)

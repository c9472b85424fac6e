import numpy as np
import pytest

from orrforge.constructions import construct_iii_set, iii_property_checks
from orrforge.errors import ArgumentError, ValidationError
from orrforge.families import (bi_group, c_family_group, caseii_group, caseii_witness,
                               caseiii_group, discover_caseiii_instance)
from orrforge.groups import (abelian, center_of_subgroup, cyclic, half_inversion_set,
                             is_generalized_dihedral)
from orrforge.search import verify_orr


@pytest.fixture(scope="module", params=["elementary", "c4"])
def iii_instance(request):
    w = discover_caseiii_instance(2 ** 11, request.param)
    return request.param, w, construct_iii_set(w)


def test_caseii_group_structure():
    A = abelian([4, 2])
    G = caseii_group(A, np.arange(8), 0)
    assert G.order == 4 * A.order
    w = caseii_witness(G, 8)
    assert G.orders[w.g] == 2 and G.mul(w.n, w.n) == 0
    # alpha = id and n^2 = 1 make g invert the abelian group A x <n>
    assert is_generalized_dihedral(G)[0]


def test_caseii_group_rejects_bad_alpha():
    A = cyclic(4)
    with pytest.raises((ArgumentError, ValidationError)):
        caseii_group(A, [0, 2, 1, 3], 0)


def test_bi_group_shapes():
    w = bi_group(2, 3)
    assert w.group.order == 2 ** (2 * 2 + 3 + 1) and w.split
    assert len(w.v) == len(w.w) == 2 and len(w.e) == 3
    nw = bi_group(2, 3, split=False)
    assert not nw.split and nw.group.order == w.group.order
    with pytest.raises(ArgumentError):
        bi_group(3, 0, split=False)


def test_c_family_group_validates():
    A = abelian([4] + [2] * 6)
    a = [A.generators[f"a{i + 1}"] for i in range(7)]
    cw, iiw = c_family_group(6, {1: a[2], 2: a[1]}, 0)
    assert cw.group.order == 2 * 2 * A.order and cw.k == 6
    assert iiw.g == cw.g
    with pytest.raises(ArgumentError):
        c_family_group(6, {0: a[1]}, 0)


def test_caseiii_invariants(iii_instance):
    _, w, _ = iii_instance
    G = w.group
    assert G.order == 2 ** 11
    H, frac = half_inversion_set(G, w.N, G.conjugation_map(w.g))
    assert frac == 1 / 2 and H == w.H
    assert len(w.N) // len(center_of_subgroup(G, w.N)) == 8
    x = G.prod([w.g, w.x3, w.x4])
    assert G.mul(x, x) == w.d
    assert not is_generalized_dihedral(G)[0]


def test_caseiii_construction(iii_instance):
    base, w, cons = iii_instance
    assert cons.route == base
    assert all(iii_property_checks(w, cons).values())
    assert verify_orr(w.group, cons.conn)[0]


@pytest.mark.parametrize("beta", [{}, {(0, 1): 1}])
def test_caseiii_rejects_wrong_fraction(beta):
    with pytest.raises(ValidationError, match="half"):
        caseiii_group([2] * 7, beta)


def test_caseiii_argument_errors():
    with pytest.raises(ArgumentError):
        caseiii_group([2] * 7, {(1, 0): 1})
    with pytest.raises(ArgumentError):
        discover_caseiii_instance(2 ** 10)
    with pytest.raises(ArgumentError):
        discover_caseiii_instance(2 ** 11, "cyclic")

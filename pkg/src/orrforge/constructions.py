"""Connection-set recipes for oriented regular representations.

Every recipe validates its hypotheses before building anything, and every
free choice is resolved by a lowest-index-first scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .autengine import stabiliser_is_trivial, stabiliser_generators
from .digraph import ConnectionSet, cayley, components, induced_subdigraph, mutual_inneighbours, weakly_connected
from .errors import PreconditionError, ValidationError
from .groups import (CaseIIIWitness, CaseIIWitness, F2Span, FiniteGroup, center_of_subgroup,
                     decompose_involution_module, elementary_abelian_coordinates,
                     invariant_factor_decomposition, is_generalized_dihedral, quotient,
                     subgroup_as_group)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImrichTuple:
    group: FiniteGroup
    elements: tuple[int, ...]

    def validate(self) -> "ImrichTuple":
        G, xs = self.group, list(self.elements)
        if len(xs) < 6:
            raise PreconditionError(f"Imrich sets need rank k >= 6, got {len(xs)}")
        _check_independent_involutions(G, xs, "Imrich tuple")
        return self


@dataclass(frozen=True)
class BiWitness:
    """``G = <V, x>`` with ``V`` elementary abelian on basis ``v_i, w_i, e_j``."""
    ell: int
    kappa: int
    group: FiniteGroup
    x: int
    v: tuple[int, ...]
    w: tuple[int, ...]
    e: tuple[int, ...]

    @property
    def split(self) -> bool:
        return self.group.mul(self.x, self.x) == 0

    @property
    def basis(self) -> list[int]:
        return list(self.v) + list(self.w) + list(self.e)

    def validate(self) -> "BiWitness":
        G = self.group
        if len(self.v) != self.ell or len(self.w) != self.ell or len(self.e) != self.kappa:
            raise ValidationError("basis lengths do not match (ell, kappa)")
        basis = self.basis
        _check_independent_involutions(G, basis, "V basis")
        V = G.closure(basis)
        if not G.is_abelian_subset(V):
            raise ValidationError("V is not abelian")
        if not G.generates(basis + [self.x]):
            raise ValidationError("V and x do not generate G")
        for a, b in zip(self.v, self.w):
            if G.conj(a, self.x) != b or G.conj(b, self.x) != a:
                raise ValidationError("x does not swap v_i and w_i")
        for e in self.e:
            if G.conj(e, self.x) != e:
                raise ValidationError("x does not fix e_j")
        sq = G.mul(self.x, self.x)
        if sq != 0 and (self.kappa < 1 or sq != self.e[0]):
            raise ValidationError("x^2 must be 1 or e_1")
        return self


@dataclass(frozen=True)
class CWitness:
    """``A = <a_1> x ... x <a_{k+1}>`` with ``o(a_1) = 4``, ``g`` inverting ``A``, ``n`` normalising."""
    group: FiniteGroup
    a: tuple[int, ...]
    g: int
    n: int

    @property
    def k(self) -> int:
        return len(self.a) - 1

    @property
    def A(self) -> frozenset[int]:
        return self.group.closure(self.a)

    def validate(self) -> "CWitness":
        G, a = self.group, list(self.a)
        if len(a) < 2 or G.orders[a[0]] != 4 or any(G.orders[x] != 2 for x in a[1:]):
            raise ValidationError("A needs a_1 of order 4 and involutions a_2..a_{k+1}")
        A = G.closure(a)
        if len(A) != 2 ** (len(a) + 1) or not G.is_abelian_subset(A):
            raise ValidationError("a_1..a_{k+1} do not give an abelian C4 x C2^k")
        g, n = self.g, self.n
        if G.mul(g, g) != 0:
            raise ValidationError("g must be an involution")
        if any(G.conj(x, g) != int(G.inv[x]) for x in a):
            raise ValidationError("g must invert every a_i")
        if any(G.conj(x, n) not in A for x in a):
            raise ValidationError("n must normalise A")
        if G.mul(n, n) not in A:
            raise ValidationError("n^2 must lie in A")
        if G.conj(n, g) != int(G.inv[n]):
            raise ValidationError("g must invert n")
        if all(G.conj(x, n) == x for x in a):
            raise ValidationError("n centralises A")
        if not G.generates(a + [g, n]):
            raise ValidationError("A, g and n do not generate G")
        return self


def _check_independent_involutions(G: FiniteGroup, xs: Sequence[int], what: str) -> None:
    if any(G.orders[x] != 2 for x in xs):
        raise ValidationError(f"{what} must consist of involutions")
    sub = np.array(xs)
    block = G.table[np.ix_(sub, sub)]
    if not np.array_equal(block, block.T):
        raise ValidationError(f"{what} elements do not commute")
    if len(G.closure(xs)) != 2 ** len(xs):
        raise ValidationError(f"{what} is not independent")


# ---------------------------------------------------------------------------
# Imrich sets and beautiful tuples
# ---------------------------------------------------------------------------

def imrich_elements(G: FiniteGroup, xs: Sequence[int]) -> list[int]:
    """The 2k+1 elements built from the tuple ``x_1..x_k``, in display order."""
    k = len(xs)
    p = G.prod
    out = list(xs)
    out += [p([xs[i], xs[i + 1]]) for i in range(k - 1)]
    out += [p([xs[0], xs[1], xs[k - 3], xs[k - 2]]), p([xs[0], xs[1], xs[k - 2], xs[k - 1]])]
    return out


def imrich_connection_set(t: ImrichTuple) -> ConnectionSet:
    t.validate()
    elems = imrich_elements(t.group, t.elements)
    if len(set(elems)) != 2 * len(t.elements) + 1:
        raise ValidationError("Imrich elements are not distinct")
    return ConnectionSet(t.group, elems)


def beautiful_tuple_check(G: FiniteGroup, t: Sequence[int]) -> bool:
    t = list(t)
    if not t or not G.generates(t):
        return False
    if G.order == 1:
        return False
    for i in range(len(t)):
        if G.generates(t[:i] + t[i + 1:]):
            return False
    if any(G.orders[x] <= 2 for x in t):
        return False
    for a, b in zip(t, t[1:]):
        if G.orders[G.mul(b, int(G.inv[a]))] <= 2:
            return False
    return True


def find_beautiful_tuple(G: FiniteGroup, max_length: int = 5) -> tuple[int, ...] | None:
    """Lowest beautiful tuple in (length, lexicographic) order, or None."""
    cands = [x for x in range(G.order) if G.orders[x] > 2]
    t = G.table
    inv = G.inv
    for length in range(1, max_length + 1):
        def rec(prefix):
            if len(prefix) == length:
                if beautiful_tuple_check(G, prefix):
                    return tuple(prefix)
                return None
            for x in cands:
                if x in prefix:
                    continue
                if prefix and G.orders[t[x, inv[prefix[-1]]]] <= 2:
                    continue
                if prefix and G.closure_mask(prefix)[x]:
                    continue
                found = rec(prefix + [x])
                if found:
                    return found
            return None
        found = rec([])
        if found:
            return found
    return None


# ---------------------------------------------------------------------------
# abelian 2-groups
# ---------------------------------------------------------------------------

def _abelian_generators(A: FiniteGroup) -> tuple[list[int], list[int]]:
    """X = (x_1..x_m) and the Y list for an abelian 2-group meeting the hypotheses."""
    if not A.is_abelian():
        raise PreconditionError("group is not abelian")
    n = A.order
    if n & (n - 1) or n == 1:
        raise PreconditionError("group is not a non-trivial 2-group")
    fac = invariant_factor_decomposition(A)
    gens = [g for g, _ in fac]
    orders = [o for _, o in fac]
    m = len(gens)
    if orders[0] == 2:
        raise PreconditionError("group is elementary abelian")
    if orders[0] == 4 and (m == 1 or orders[1] == 2):
        raise PreconditionError("group is isomorphic to C4 x C2^(k-2)")
    mul, inv = A.mul, lambda x: int(A.inv[x])
    a = gens
    x: list[int] = []
    if orders[0] > 4:
        x.append(a[0])
        if m >= 2:
            x.append(mul(inv(a[0]), a[1]))
        for i in range(3, m + 1):
            x.append(mul(a[0] if (i - 1) % 2 == 0 else inv(a[0]), a[i - 1]))
    else:
        x += [a[0], a[1]]
        for i in range(3, m + 1):
            x.append(mul(a[0] if i % 2 == 1 else a[1], a[i - 1]))
    if m == 1:
        y = [mul(x[0], x[0])]
    else:
        first = mul(x[1], inv(mul(x[0], x[0]))) if orders[0] > 4 else mul(x[0], x[1])
        y = [first] + [mul(x[i], inv(x[i - 1])) for i in range(1, m)]
    return x, y


def abelian_2group_orr_set(A: FiniteGroup) -> ConnectionSet:
    x, y = _abelian_generators(A)
    S = ConnectionSet(A, x + y)
    if len(S) != len(x) + len(y) or not S.antisymmetric:
        raise ValidationError("abelian construction produced a degenerate set")
    return S


def abelian_expected_arcs(A: FiniteGroup) -> set[tuple[int, int]]:
    """Arcs of the induced digraph on S that the construction is designed to have."""
    x, y = _abelian_generators(A)
    m = len(x)
    mul, inv = A.mul, lambda e: int(A.inv[e])
    arcs = set()
    if m == 1:
        arcs.add((x[0], mul(x[0], x[0])))
        return arcs
    for i in range(1, m):
        q = mul(x[i], inv(x[i - 1]))
        arcs.add((x[i - 1], x[i]))
        arcs.add((q, x[i]))
    q21 = mul(x[1], inv(x[0]))
    if y[0] == mul(x[0], x[1]) and A.orders[x[0]] == 4:
        arcs.add((x[0], y[0]))
        arcs.add((x[1], y[0]))
    else:
        arcs.add((x[0], q21))
        arcs.add((y[0], q21))
    return arcs


def induced_arcs(D, S: Iterable[int]) -> set[tuple[int, int]]:
    sub = induced_subdigraph(D, S)
    return {(sub.labels[u], sub.labels[v]) for u, v in sub.arcs().tolist()}


# ---------------------------------------------------------------------------
# extensions over a normal subgroup
# ---------------------------------------------------------------------------

def _subgroup_orr(G: FiniteGroup, N: Sequence[int], T: Sequence[int], timeout=None):
    sub, old = subgroup_as_group(G, N)
    pos = {int(o): i for i, o in enumerate(old)}
    Tn = ConnectionSet(sub, [pos[t] for t in T])
    D = cayley(sub, Tn)
    return sub, Tn, D


def find_nonsplit_generators(G: FiniteGroup, N: Iterable[int]) -> list[int]:
    """Elements of order > 2 whose cosets form a basis of the elementary abelian ``G/N``."""
    N = sorted(set(N))
    if not G.is_normal(N):
        raise PreconditionError("N is not normal")
    Q, coset = quotient(G, N)
    if not (Q.orders <= 2).all():
        raise PreconditionError("G/N is not elementary abelian")
    if is_generalized_dihedral(G)[0]:
        raise PreconditionError("G is generalised dihedral")
    basis, qcoord = elementary_abelian_coordinates(Q, range(Q.order))
    span = F2Span()
    out = []
    for e in range(G.order):
        if len(out) == len(basis):
            break
        if G.orders[e] <= 2:
            continue
        c = qcoord[int(coset[e])]
        if c and span.add(c):
            out.append(e)
    if len(out) != len(basis):
        raise ValidationError("cosets containing non-involutions do not span G/N")
    return out


def l1_extension(G: FiniteGroup, N: Iterable[int], T: Iterable[int], a: Sequence[int],
                 timeout: float | None = None) -> ConnectionSet:
    """``S = T u {a_1..a_k}`` after checking every hypothesis of the extension."""
    N = sorted(set(N))
    T = sorted(set(T))
    a = list(a)
    Nset = set(N)
    if not G.is_subgroup(N) or not G.is_normal(N):
        raise PreconditionError("N is not a normal subgroup")
    Q, coset = quotient(G, N)
    if not (Q.orders <= 2).all():
        raise PreconditionError("G/N is not elementary abelian")
    if len(T) < 2 or not set(T) <= Nset:
        raise PreconditionError("T must be a subset of N with at least two elements")
    sub, Tn, D = _subgroup_orr(G, N, T)
    if not Tn.antisymmetric or not stabiliser_is_trivial(D, 0, timeout).trivial:
        raise PreconditionError("Cay(N, T) is not an ORR")
    if not weakly_connected(induced_subdigraph(D, Tn.members)):
        raise PreconditionError("the induced digraph on T is not weakly connected")
    if not G.generates(a + N):
        raise PreconditionError("a and N do not generate G")
    rank = Q.order.bit_length() - 1
    if len(a) != rank:
        raise PreconditionError(f"need exactly d(G/N) = {rank} extenders, got {len(a)}")
    for i, x in enumerate(a):
        if x in Nset:
            raise PreconditionError(f"extender a_{i + 1} lies in N")
        if G.orders[x] <= 2:
            raise PreconditionError(f"o(a_{i + 1}) > 2 fails")
    Narr = np.array(N)

    def centralises(z):
        return bool(np.array_equal(G.table[z, Narr], G.table[Narr, z]))

    sq = [G.mul(x, x) for x in a]
    for i in range(len(a)):
        if not centralises(sq[i]):
            raise PreconditionError(f"a_{i + 1}^2 does not centralise N")
    for i, j in combinations(range(len(a)), 2):
        if sq[i] == sq[j] and centralises(G.mul(a[i], a[j])):
            raise PreconditionError(
                f"pair ({i + 1},{j + 1}): a_i^2 = a_j^2 and a_i a_j centralises N")
    return ConnectionSet(G, T + a)


# ---------------------------------------------------------------------------
# reduction of the index-4 abelian case
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DispatchVerdict:
    kind: str                      # "ORR", "B_i", "B_ii", "C", "GeneralisedDihedral"
    conn: ConnectionSet | None = None
    bi: BiWitness | None = None
    c: CWitness | None = None


def _abelian_type(G: FiniteGroup, A: Iterable[int]) -> tuple[list[int], list[int]]:
    sub, old = subgroup_as_group(G, A)
    fac = invariant_factor_decomposition(sub)
    return [int(old[g]) for g, _ in fac], [o for _, o in fac]


def prop_reduction_dispatch(w: CaseIIWitness, timeout: float | None = None) -> DispatchVerdict:
    w.validate()
    G, g, n = w.group, w.g, w.n
    A = sorted(w.A)
    gens, orders = _abelian_type(G, A)
    if all(o == 2 for o in orders) or len(A) == 1:
        bw = _b_witness(G, A, g, n)
        return DispatchVerdict("B_i" if bw.split else "B_ii", bi=bw)
    if orders[0] == 4 and all(o == 2 for o in orders[1:]):
        if all(G.conj(x, n) == x for x in gens) or is_generalized_dihedral(G)[0]:
            return DispatchVerdict("GeneralisedDihedral")
        return DispatchVerdict("C", c=CWitness(G, tuple(gens), g, n).validate())
    if is_generalized_dihedral(G)[0]:
        return DispatchVerdict("GeneralisedDihedral")
    sub, old = subgroup_as_group(G, A)
    T = [int(old[t]) for t in abelian_2group_orr_set(sub)]
    a = find_nonsplit_generators(G, A)
    S = l1_extension(G, A, T, a, timeout)
    return DispatchVerdict("ORR", conn=S)


def _b_witness(G: FiniteGroup, A, g: int, n: int) -> BiWitness:
    V = sorted(G.closure(list(A) + [g]))
    act = G.conjugation_map(n)
    pairs, fixed = decompose_involution_module(G, V, act)
    sq = G.mul(n, n)
    # express n^2 in the new basis (v_i, w_i, e_j)
    new_basis = [p[0] for p in pairs] + [p[1] for p in pairs] + fixed
    span = {0: 0}
    for i, b in enumerate(new_basis):
        for x, c in list(span.items()):
            span[G.mul(x, b)] = c | (1 << i)
    ell = len(pairs)
    c = span[sq]
    x = n
    for i in range(ell):
        if c >> i & 1:
            x = G.mul(x, pairs[i][0])
    xsq = G.mul(x, x)
    v = [p[0] for p in pairs]
    wv = [p[1] for p in pairs]
    e = list(fixed)
    if xsq != 0:
        cc = span[xsq]
        eta = [(cc >> (2 * ell + j)) & 1 for j in range(len(e))]
        j0 = eta.index(1)
        e = [xsq] + e[:j0] + e[j0 + 1:]
    return BiWitness(ell, len(e), G, x, tuple(v), tuple(wv), tuple(e)).validate()


# ---------------------------------------------------------------------------
# the B families
# ---------------------------------------------------------------------------

def construct_bi_set(w: BiWitness) -> ConnectionSet:
    w.validate()
    if not w.split:
        raise PreconditionError("construct_bi_set needs x^2 = 1")
    ell, kappa = w.ell, w.kappa
    if ell <= 1:
        raise PreconditionError("ell <= 1: the group is generalised dihedral")
    if 2 * ell + kappa < 8:
        raise PreconditionError("need 2*ell + kappa >= 8")
    G = w.group
    v, wv, e = w.v, w.w, w.e
    mul = G.mul
    if kappa >= 2:
        tup = list(v[1:]) + list(wv[1:]) + list(e)
    else:
        tup = [v[1], mul(v[3], wv[3]), v[2], mul(v[1], wv[1]), v[3], mul(v[1], wv[2])]
        tup += list(v[4:]) + list(e)
    T = set(imrich_connection_set(ImrichTuple(G, tuple(tup))))
    Vi = G.closure(tup)
    v1x = mul(v[0], w.x)
    S = [mul(u, v1x) for u in sorted(Vi) if u not in T and u != 0]
    S.append(mul(v[1], w.x))
    return ConnectionSet(G, S)


def construct_bii_set(w: BiWitness) -> ConnectionSet:
    w.validate()
    if w.kappa < 1:
        raise PreconditionError("kappa >= 1 is needed for x^2 = e_1")
    if w.split:
        raise PreconditionError("construct_bii_set needs x^2 = e_1")
    if 2 * w.ell + w.kappa < 7:
        raise PreconditionError("need 2*ell + kappa >= 7")
    G = w.group
    tup = list(w.v) + list(w.w) + list(w.e[1:])
    T = imrich_connection_set(ImrichTuple(G, tuple(tup)))
    return ConnectionSet(G, [G.mul(t, w.x) for t in T] + [w.x])


# ---------------------------------------------------------------------------
# the C family
# ---------------------------------------------------------------------------

def _order4(G, A):
    return [x for x in sorted(A) if G.orders[x] == 4]


def _involutions_generators_first(w: CWitness) -> list[int]:
    """``a_2..a_{k+1}`` in declaration order, then the other involutions of A by index."""
    G = w.group
    head = list(w.a[1:])
    return head + [b for b in sorted(w.A) if G.orders[b] == 2 and b not in head]


def find_order4_not_centralised(w: CWitness) -> int:
    G, n = w.group, w.n
    if is_generalized_dihedral(G)[0]:
        raise PreconditionError("G is generalised dihedral")
    a1 = w.a[0]
    if G.conj(a1, n) != a1:
        return a1
    for b in _involutions_generators_first(w):
        if G.conj(b, n) != b:
            return G.mul(a1, b)
    raise ValidationError("n centralises A")


def find_not_inverted(w: CWitness) -> int:
    G, n = w.group, w.n
    if G.orders[n] != 2:
        raise PreconditionError("o(n) = 2 is required")
    if is_generalized_dihedral(G)[0]:
        raise PreconditionError("G is generalised dihedral")
    a1 = w.a[0]
    if G.conj(a1, n) != int(G.inv[a1]):
        return a1
    for b in _involutions_generators_first(w):
        if G.conj(b, n) != b:
            return G.mul(a1, b)
    raise ValidationError("n inverts every element of A")


@dataclass
class CConstruction:
    conn: ConnectionSet
    case: int
    a: int
    B: list[int]
    T: list[int]
    extras: list[int]
    b: tuple[int, ...] = ()


def construct_c_set(w: CWitness) -> CConstruction:
    w.validate()
    G, g, n = w.group, w.g, w.n
    if w.k < 6:
        raise PreconditionError("k >= 6 is required")
    if is_generalized_dihedral(G)[0]:
        raise PreconditionError("G is generalised dihedral")
    mul, inv = G.mul, lambda x: int(G.inv[x])
    A = w.A
    Bgens = list(w.a[1:])
    B = sorted(G.closure(Bgens))
    T = imrich_elements(G, Bgens)
    Tset = set(T)
    n2 = mul(n, n)
    ninv = inv(n)
    n2inv = inv(n2)
    on = int(G.orders[n])

    def base_part(a):
        return [mul(b, a) for b in B if b not in Tset and b != 0]

    first = find_order4_not_centralised(w)
    cands = [first] + [x for x in _order4(G, A) if x != first and G.conj(x, n) != x]

    def finish(case, a, extras, bs=()):
        S = ConnectionSet(G, base_part(a) + extras)
        return CConstruction(S, case, a, B, T, extras, tuple(bs))

    for a in cands:
        an = G.conj(a, n)
        if on != 2 and an != mul(n2inv, inv(a)):
            return finish(1, a, [ninv, mul(mul(a, ninv), g), mul(a, n)])
        if on == 2 and an != inv(a):
            return finish(2, a, [mul(mul(a, ninv), g), mul(a, n)])
    if all(G.conj(x, n) == mul(n2inv, inv(x)) for x in _order4(G, A)):
        return finish(3, first, [mul(mul(first, ninv), g), n])
    a = first
    CB = [b for b in B if G.conj(b, n) == b and b != 0]
    for b1 in B:
        if b1 == 0 or G.conj(mul(a, b1), n) != mul(a, b1):
            continue
        for b2, b3 in combinations(CB, 2):
            ab1 = mul(a, b1)
            extras = [mul(mul(a, ninv), g), mul(ab1, n), mul(mul(ab1, b2), n), mul(mul(ab1, b3), n)]
            res = finish(4, a, extras, (b1, b2, b3))
            if len(set(extras)) == 4 and res.conn.antisymmetric:
                return res
    raise ValidationError("no elements b_1, b_2, b_3 satisfy the case-4 requirements")


# ---------------------------------------------------------------------------
# predicates around cosets of an elementary abelian subgroup
# ---------------------------------------------------------------------------

def b_distinct_check(G: FiniteGroup, S: ConnectionSet, B: Sequence[int], x: int,
                     T: Sequence[int], X: Sequence[int], timeout: float | None = None) -> dict:
    """Verify that the stabiliser fixes ``B`` and ``x`` and the out-neighbour counting claim."""
    B = sorted(set(B))
    Tset = set(T)
    X = sorted(set(X))
    if len(X) > 17:
        raise PreconditionError("|X| <= 17 is required")
    basis, _ = elementary_abelian_coordinates(G, B)
    k = len(basis)
    if k < 6:
        raise PreconditionError("B must have rank >= 6")
    if any(G.mul(b, x) != G.mul(x, b) for b in B):
        raise PreconditionError("x does not centralise B")
    expect = {G.mul(b, x) for b in B if b not in Tset and b != 0} | set(X)
    if expect != set(S.members):
        raise PreconditionError("S is not [(Bx \\ Tx) \\ {x}] u X")
    sarr = np.array(S.members)
    counts = np.bincount(G.table[np.ix_(sarr, sarr)].ravel(), minlength=G.order)
    x2 = G.mul(x, x)
    bx2 = {G.mul(b, x2) for b in B}
    threshold = 2 ** k - 4 * k - 4
    heavy = set(np.flatnonzero(counts >= threshold).tolist())
    counting = heavy == bx2
    D = cayley(G, S)
    rep = stabiliser_is_trivial(D, 0, timeout)
    if rep.trivial:
        fixed_ok = True
    else:
        gens = stabiliser_generators(D, 0, timeout, limit=None).generators
        fixed_ok = all(g[v] == v for g in gens for v in B + [x])
    return {"counting_claim": counting, "fixes_B_and_x": fixed_ok, "threshold": threshold,
            "stabiliser_trivial": rep.trivial, "ok": counting and fixed_ok}


def mut_innbrs_vertices(G: FiniteGroup, T: Sequence[int], x: int) -> list[int]:
    """Vertices of ``Tx u {x}`` with >= 3 mutual in-neighbours (via that set) with all others."""
    W = sorted({G.mul(t, x) for t in T} | {x})
    D = cayley(G, W)
    out = []
    for u in W:
        if all(len(mutual_inneighbours(D, u, v, W)) >= 3 for v in W if v != u):
            out.append(u)
    return out


# ---------------------------------------------------------------------------
# half-inverting extensions
# ---------------------------------------------------------------------------

@dataclass
class IIIConstruction:
    conn: ConnectionSet
    route: str                       # "elementary", "c4", "l1"
    a0: int | None = None
    B: list[int] = field(default_factory=list)
    T: list[int] = field(default_factory=list)
    X: list[int] = field(default_factory=list)
    Y: list[int] = field(default_factory=list)
    v: int | None = None
    x: int | None = None
    extra: int | None = None


def _choose_triple(G, B, bad):
    """Lowest ``b < b' < b''`` in B spanning order 8 with no pairwise product equal to ``bad``."""
    Bn = [b for b in B if b != 0]
    for b, b1, b2 in combinations(Bn, 3):
        zs = [0, b, b1, b2]
        if len(G.closure([b, b1, b2])) != 8:
            continue
        if any(G.mul(p, q) == bad for p, q in combinations(zs, 2)):
            continue
        return b, b1, b2
    raise ValidationError("no b, b', b'' satisfy the constraints")


def _choose_pair(G, B, bad):
    Bn = [b for b in B if b != 0]
    for c, c1 in combinations(Bn, 2):
        if len(G.closure([c, c1])) != 4:
            continue
        if any(G.mul(p, q) == bad for p, q in combinations([0, c, c1], 2)):
            continue
        return c, c1
    raise ValidationError("no c, c' satisfy the constraints")


def construct_iii_set(w: CaseIIIWitness, timeout: float | None = None) -> IIIConstruction:
    w.validate()
    G, g, x3, x4 = w.group, w.g, w.x3, w.x4
    mul, inv = G.mul, lambda e: int(G.inv[e])
    A = sorted(w.A)
    gens, orders = _abelian_type(G, A)
    ZN = sorted(center_of_subgroup(G, w.N))
    zset = set(ZN)
    elementary = all(o == 2 for o in orders)
    c4 = orders[0] == 4 and all(o == 2 for o in orders[1:])
    ell = len(orders) if elementary else len(orders) - 1
    if not elementary and not c4:
        sub, old = subgroup_as_group(G, A)
        T = [int(old[t]) for t in abelian_2group_orr_set(sub)]
        a = find_nonsplit_generators(G, A)
        return IIIConstruction(l1_extension(G, A, T, a, timeout), "l1", T=T, X=a)
    if elementary and ell < 8:
        raise PreconditionError("elementary abelian A needs rank >= 8")
    if c4 and ell < 6:
        raise PreconditionError("A = C4 x C2^ell needs ell >= 6")
    if is_generalized_dihedral(G)[0]:
        raise PreconditionError("G is generalised dihedral")

    if elementary:
        a0 = next(a for a in A if a not in zset)
        d = w.d
        span = F2Span()
        _, zc = elementary_abelian_coordinates(G, ZN)
        span.add(zc[d])
        Bg = []
        for z in ZN:
            if z and span.add(zc[z]):
                Bg.append(z)
        if len(Bg) != ell - 2:
            raise ValidationError("Z(N) does not have the expected rank")
    else:
        a0 = next(a for a in A if a not in zset and G.orders[a] == 4)
        sq = mul(a0, a0)
        inv2 = [a for a in A if G.orders[a] == 2]
        _, ac = elementary_abelian_coordinates(G, [0] + inv2)
        span = F2Span()
        span.add(ac[sq])
        Bg = []
        for z in inv2:
            if span.add(ac[z]):
                Bg.append(z)
        if len(Bg) != ell:
            raise ValidationError("could not find a rank-ell complement to the square")
    B = sorted(G.closure(Bg))
    T = imrich_elements(G, Bg)
    Tset = set(T)
    r3 = mul(G.conj(inv(a0), x3), a0)
    r4 = mul(G.conj(inv(a0), x4), a0)
    b, b1, b2 = _choose_triple(G, B, r3)
    c, c1 = _choose_pair(G, B, r4)
    gx3a0 = G.prod([g, x3, a0])
    gx4a0 = G.prod([g, x4, a0])
    X = [gx3a0] + [mul(gx3a0, z) for z in (b, b1, b2)]
    Y = [gx4a0] + [mul(gx4a0, z) for z in (c, c1)]
    x = G.prod([g, x3, x4])
    if elementary:
        K = G.closure(ZN + [g, mul(x3, a0), mul(x4, a0)])
        if 2 * len(K) != G.order:
            raise ValidationError("<Z(N), g, x3 a0, x4 a0> does not have index 2")
        v = next((e for e in range(G.order) if e not in K and G.orders[e] > 2), None)
        if v is None:
            raise ValidationError("no element of order > 2 outside the index-2 subgroup")
        xd = mul(x, w.d)
        S = [mul(x, z) for z in B if z not in Tset and z != 0] + X + Y + [v, xd]
        return IIIConstruction(ConnectionSet(G, S), "elementary", a0, B, T, X, Y, v, x, xd)
    S = [mul(z, a0) for z in B if z not in Tset and z != 0] + X + Y + [x]
    return IIIConstruction(ConnectionSet(G, S), "c4", a0, B, T, X, Y, None, x, x)


def iii_property_checks(w: CaseIIIWitness, cons: IIIConstruction) -> dict[str, bool]:
    """Checks that do not need the full stabiliser computation."""
    G = w.group
    S = cons.conn
    out = {"oriented": S.antisymmetric, "generates": S.generates,
           "size": len(S) == len(set(S.members))}
    if cons.route == "l1":
        D = cayley(G, S)
        delta = induced_subdigraph(D, S.members)
        comps = components(delta)
        ext = set(cons.X)
        pos = {lab: i for i, lab in enumerate(delta.labels)}
        out["extenders_isolated"] = all([pos[a]] in comps for a in ext)
        return out
    Bset = set(cons.B)
    sarr = np.array(S.members)
    t = G.table
    if cons.route == "elementary":
        r = len(cons.B).bit_length() - 1
        outs_xd = set(t[sarr, cons.extra].tolist()) & Bset
        outs_v = set(t[sarr, cons.v].tolist()) & Bset
        out["extra_outneighbours_in_B"] = len(outs_xd) == 2 ** r - 2 * r - 2
        out["extender_isolated"] = len(outs_v) <= 1
        rest = [s for s in S.members if s not in set(cons.X) | set(cons.Y) | {cons.v, cons.extra}]
        X = cons.X + cons.Y + [cons.v, cons.extra]
        bd_x = cons.x
    else:
        X = cons.X + cons.Y + [cons.x]
        bd_x = cons.a0
        out["extender_isolated"] = True
        rest = [s for s in S.members if s not in set(X)]
    # counting claim: out-neighbours of many vertices of S are exactly B x^2
    k = len(cons.B).bit_length() - 1
    counts = np.bincount(t[np.ix_(sarr, sarr)].ravel(), minlength=G.order)
    x2 = G.mul(bd_x, bd_x)
    heavy = set(np.flatnonzero(counts >= 2 ** k - 4 * k - 4).tolist())
    out["counting_claim"] = heavy == {G.mul(b, x2) for b in cons.B}
    out["coset_shape"] = len(rest) == 2 ** k - 2 * k - 2 and len(X) <= 17
    return out

"""Concrete groups for the structured families, each returned with its witness."""

from __future__ import annotations

from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .constructions import BiWitness, CWitness
from .errors import ArgumentError, ValidationError
from .groups import (CaseIIIWitness, CaseIIWitness, FiniteGroup, abelian, half_inversion_set,
                     is_generalized_dihedral)


def bi_group(ell: int, kappa: int, split: bool = True) -> BiWitness:
    """``V = C2^(2 ell + kappa)`` extended by ``x`` swapping ``v_i`` and ``w_i``.

    ``x^2 = 1`` when ``split`` and ``x^2 = e_1`` otherwise.
    """
    if ell < 0 or kappa < 0:
        raise ArgumentError("ell and kappa must be non-negative")
    if not split and kappa < 1:
        raise ArgumentError("x^2 = e_1 needs kappa >= 1")
    r = 2 * ell + kappa
    if r > 14:
        raise ArgumentError("rank too large for a multiplication table")
    m = 1 << r
    vs = np.arange(m)
    sigma = np.zeros(m, dtype=np.int64)
    for i in range(ell):
        lo, hi = (vs >> (2 * i)) & 1, (vs >> (2 * i + 1)) & 1
        sigma |= (lo << (2 * i + 1)) | (hi << (2 * i))
    sigma |= vs & ~((1 << (2 * ell)) - 1)
    c = 0 if split else 1 << (2 * ell)
    idx = np.arange(2 * m)
    v, j = idx % m, idx // m
    V1, V2 = v[:, None], v[None, :]
    J1, J2 = j[:, None], j[None, :]
    moved = np.where(J1 == 1, sigma[V2], V2)
    res_v = V1 ^ moved ^ np.where((J1 & J2) == 1, c, 0)
    table = (res_v + m * (J1 ^ J2)).astype(np.int32)
    names = {}
    for i in range(ell):
        names[f"v{i + 1}"] = 1 << (2 * i)
        names[f"w{i + 1}"] = 1 << (2 * i + 1)
    for k in range(kappa):
        names[f"e{k + 1}"] = 1 << (2 * ell + k)
    names["x"] = m
    kind = "Bi" if split else "Bii"
    G = FiniteGroup(table, f"{kind}({ell},{kappa})", names)
    w = BiWitness(ell, kappa, G, m,
                  tuple(1 << (2 * i) for i in range(ell)),
                  tuple(1 << (2 * i + 1) for i in range(ell)),
                  tuple(1 << (2 * ell + k) for k in range(kappa)))
    return w.validate()


def caseii_group(A: FiniteGroup, alpha: Sequence[int], c: int, name: str = "G") -> FiniteGroup:
    """Elements ``a n^i g^j``: ``n a n^-1 = alpha(a)``, ``n^2 = c``, ``g`` inverts ``A`` and ``n``.

    ``alpha`` must be an involutory automorphism of the abelian group ``A``
    fixing ``c``.
    """
    if not A.is_abelian():
        raise ArgumentError("A must be abelian")
    al = np.asarray(alpha, dtype=np.int64)
    m = A.order
    if sorted(al.tolist()) != list(range(m)):
        raise ArgumentError("alpha is not a permutation")
    if not np.array_equal(al[A.table], A.table[np.ix_(al, al)]):
        raise ArgumentError("alpha is not an automorphism")
    if not np.array_equal(al[al], np.arange(m)) or al[c] != c:
        raise ArgumentError("alpha must be an involution fixing c")
    t = A.table.astype(np.int64)
    inv = A.inv.astype(np.int64)
    cinv = int(inv[c])
    idx = np.arange(4 * m)
    a, i, j = idx % m, (idx // m) % 2, idx // (2 * m)
    a1, i1, j1 = a[:, None], i[:, None], j[:, None]
    a2, i2, j2 = a[None, :], i[None, :], j[None, :]
    b = np.where(j1 == 1, inv[a2], a2)
    b = np.where((j1 & i2) == 1, t[b, cinv], b)
    b = np.where(i1 == 1, al[b], b)
    res = t[a1, b]
    res = np.where((i1 & i2) == 1, t[res, c], res)
    table = (res + m * ((i1 ^ i2) + 2 * (j1 ^ j2))).astype(np.int32)
    names = dict(A.generators)
    names["n"] = m
    names["g"] = 2 * m
    return FiniteGroup(table, name, names)


def caseii_witness(G: FiniteGroup, m: int) -> CaseIIWitness:
    """The witness for a group built by :func:`caseii_group` over ``A`` of order ``m``."""
    return CaseIIWitness(G, frozenset(range(m)), frozenset(range(2 * m)), 2 * m, m).validate()


def c_family_group(k: int, alpha_images: dict[int, int] | None = None, c: int = 0,
                   ) -> tuple[CWitness, CaseIIWitness]:
    """``A = C4 x C2^k`` with ``alpha`` given on the generators ``a_1..a_{k+1}`` (images as elements of A)."""
    A = abelian([4] + [2] * k)
    gens = [A.generators[f"a{i + 1}"] for i in range(k + 1)]
    images = dict(alpha_images or {})
    alpha = _extend_hom(A, gens, [images.get(i, g) for i, g in enumerate(gens)])
    G = caseii_group(A, alpha, c, f"C4xC2^{k}.n.g")
    m = A.order
    return CWitness(G, tuple(gens), 2 * m, m).validate(), caseii_witness(G, m)


def _extend_hom(A: FiniteGroup, gens: Sequence[int], images: Sequence[int]) -> np.ndarray:
    out = np.full(A.order, -1, dtype=np.int64)
    out[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in zip(gens, images):
                y = int(A.table[x, g])
                val = int(A.table[out[x], h])
                if out[y] < 0:
                    out[y] = val
                    nxt.append(y)
                elif out[y] != val:
                    raise ArgumentError("images do not define a homomorphism")
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# half-inverting model: N = F2^3 extended by Z through a bilinear cocycle
# ---------------------------------------------------------------------------

def caseiii_group(z_orders: Sequence[int], beta: dict[tuple[int, int], int],
                  name: str = "G") -> CaseIIIWitness:
    """Group of pairs ``(v, z)`` with ``v`` in ``F2^3`` (bits t, x3, x4) and ``z`` in ``Z``.

    ``(v, z)(v', z') = (v + v', z + z' + beta(v, v'))`` with ``beta`` bilinear
    and upper triangular on the basis; ``beta[(i, j)]`` must be an element of
    ``Z`` of order at most 2.  The involution ``g`` sends ``(v, z)`` to
    ``(v, -z + q(v))`` where ``q(e_i) = beta[(i, i)]``.
    """
    Z = abelian(list(z_orders))
    zt = Z.table.astype(np.int64)
    zinv = Z.inv.astype(np.int64)
    for (i, j), val in beta.items():
        if not (0 <= i <= j <= 2) or Z.orders[val] > 2:
            raise ArgumentError("beta entries must be upper triangular elements of order <= 2")
    m = Z.order
    B8 = np.zeros((8, 8), dtype=np.int64)
    for v, w in product(range(8), repeat=2):
        acc = 0
        for (i, j), val in beta.items():
            if v >> i & 1 and w >> j & 1:
                acc = zt[acc, val]
        B8[v, w] = acc
    q = np.zeros(8, dtype=np.int64)
    for v in range(8):
        acc = 0
        for i in range(3):
            if v >> i & 1:
                acc = zt[acc, beta.get((i, i), 0)]
        q[v] = acc
    idx = np.arange(16 * m)
    z, v, j = idx % m, (idx // m) % 8, idx // (8 * m)
    z1, v1, j1 = z[:, None], v[:, None], j[:, None]
    z2, v2, j2 = z[None, :], v[None, :], j[None, :]
    z2g = np.where(j1 == 1, zt[zinv[z2], q[v2]], z2)
    res_z = zt[zt[z1, z2g], B8[v1, v2]]
    table = (res_z + m * ((v1 ^ v2) + 8 * (j1 ^ j2))).astype(np.int32)
    names = {"t": m, "x3": 2 * m, "x4": 4 * m, "g": 8 * m}
    names.update(Z.generators)
    G = FiniteGroup(table, name, names)
    return caseiii_witness(G, m, {"z_orders": tuple(z_orders), "beta": dict(beta)})


def caseiii_witness(G: FiniteGroup, m: int, params: dict) -> CaseIIIWitness:
    N = frozenset(range(8 * m))
    g = 8 * m
    H, _ = half_inversion_set(G, N, G.conjugation_map(g))
    t, x3, x4 = m, 2 * m, 4 * m
    n0 = G.prod([x3, x4, t])
    A = frozenset(list(range(m)) + list(range(m, 2 * m)))
    d = G.commutator(x4, x3)
    return CaseIIIWitness(G, N, g, n0, H, A, n0, x3, x4, d, params).validate()


def _beta_candidates(Z: FiniteGroup, base: str) -> Iterator[dict[tuple[int, int], int]]:
    invs = [z for z in range(Z.order) if Z.orders[z] == 2]
    small = [0] + invs[:3]
    for u3, u4, d in product(invs[:4], repeat=3):
        if len({u3, u4, d}) < 3 or Z.mul(u3, u4) == d:
            continue
        for btt, b33, b44 in product(small, repeat=3):
            yield {(0, 0): btt, (1, 1): b33, (2, 2): b44, (0, 1): u3, (0, 2): u4, (1, 2): d}


def discover_caseiii_instance(target_order: int = 2 ** 11, base: str = "elementary") -> CaseIIIWitness:
    """First valid half-inverting witness of the requested order in a fixed enumeration.

    ``base`` selects ``A`` elementary abelian or ``C4 x C2^ell``.
    """
    if target_order not in (2 ** 11, 2 ** 12):
        raise ArgumentError("target order must be 2^11 or 2^12")
    r = target_order.bit_length() - 1 - 4
    if base == "elementary":
        z_orders = [2] * r
    elif base == "c4":
        z_orders = [4] + [2] * (r - 2)
    else:
        raise ArgumentError("base must be 'elementary' or 'c4'")
    Z = abelian(z_orders)
    for beta in _beta_candidates(Z, base):
        if base == "elementary" and beta[(0, 0)] != 0:
            continue
        try:
            w = caseiii_group(z_orders, beta, f"CaseIII({target_order},{base})")
        except ValidationError:
            continue
        if is_generalized_dihedral(w.group)[0]:
            continue
        return w
    raise ValidationError("no witness found in the enumeration")

"""Finite groups stored as explicit multiplication tables.

Elements are the integers ``0..n-1`` and element 0 is always the identity.
Row ``g`` column ``h`` of the table holds ``g*h``.  Conjugation follows the
right-action convention ``a^g = g^-1 a g`` throughout the package.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ValidationError

ASSOC_EXHAUSTIVE_LIMIT = 512
ASSOC_RANDOM_TRIPLES = 10**6
ASSOC_SEED = 0xC4413


def check_table(table: np.ndarray) -> None:
    """Raise ValidationError unless ``table`` is the table of a group with identity 0."""
    n = table.shape[0]
    if table.ndim != 2 or table.shape != (n, n) or n == 0:
        raise ValidationError("table must be a non-empty square array")
    ar = np.arange(n)
    if not (np.array_equal(table[0], ar) and np.array_equal(table[:, 0], ar)):
        raise ValidationError("element 0 is not a two-sided identity")
    if table.min() < 0 or table.max() >= n:
        raise ValidationError("table entry out of range")
    srt = np.sort(table, axis=1)
    if not (srt == ar).all():
        raise ValidationError("a row of the table is not a permutation")
    srt = np.sort(table, axis=0)
    if not (srt == ar[:, None]).all():
        raise ValidationError("a column of the table is not a permutation")
    if n <= ASSOC_EXHAUSTIVE_LIMIT:
        step = max(1, 2**22 // (n * n))
        for lo in range(0, n, step):
            a = ar[lo:lo + step]
            left = table[table[a]]            # (ab)c, shape (k, n, n)
            right = table[a][:, table]        # a(bc)
            if not np.array_equal(left, right):
                raise ValidationError("associativity fails")
    else:
        rng = np.random.default_rng(ASSOC_SEED)
        a, b, c = rng.integers(0, n, size=(3, ASSOC_RANDOM_TRIPLES))
        if not np.array_equal(table[table[a, b], c], table[a, table[b, c]]):
            raise ValidationError("associativity fails on a sampled triple")


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``generators`` maps display names to elements; it is used only to print
    elements as words and never affects the group structure.
    """

    def __init__(self, table, name: str = "G", generators: dict[str, int] | None = None,
                 validate: bool = True):
        table = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
        if validate:
            check_table(table)
        table.setflags(write=False)
        self.table = table
        self.name = name
        n = table.shape[0]
        self.inv = np.argmin(table, axis=1).astype(np.int32)  # column holding 0
        self.inv.setflags(write=False)
        self.orders = _element_orders(table)
        self.orders.setflags(write=False)
        self.generators = dict(generators) if generators else {}
        self._words = None
        self._n = n

    # -- basic arithmetic -------------------------------------------------
    @property
    def order(self) -> int:
        return self._n

    def __len__(self):
        return self._n

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self._n})"

    def _check(self, *elts):
        for e in elts:
            if not 0 <= e < self._n:
                raise ArgumentError(f"element {e} out of range for group of order {self._n}")

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.table[a, b])

    def prod(self, elts: Iterable[int]) -> int:
        r = 0
        for e in elts:
            r = int(self.table[r, e])
        return r

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = int(self.inv[a]), -k
        r = 0
        for _ in range(k % int(self.orders[a])):
            r = int(self.table[r, a])
        return r

    def conj(self, a: int, g: int) -> int:
        """``a^g = g^-1 a g``."""
        return int(self.table[self.table[self.inv[g], a], g])

    def commutator(self, a: int, b: int) -> int:
        """``[a, b] = a^-1 b^-1 a b``."""
        t = self.table
        return int(t[t[t[self.inv[a], self.inv[b]], a], b])

    def conjugation_map(self, g: int) -> np.ndarray:
        """Array ``x -> x^g`` over all elements."""
        return self.table[self.table[self.inv[g]], g]

    # -- subsets and subgroups -------------------------------------------
    def closure_mask(self, gens: Iterable[int]) -> np.ndarray:
        gens = np.unique(np.fromiter(gens, dtype=np.int64))
        mask = np.zeros(self._n, dtype=bool)
        mask[0] = True
        if gens.size == 0:
            return mask
        frontier = np.array([0])
        while frontier.size:
            nxt = self.table[np.ix_(frontier, gens)].ravel()
            nxt = np.unique(nxt[~mask[nxt]])
            mask[nxt] = True
            frontier = nxt
        return mask

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.closure_mask(gens)).tolist())

    def generates(self, gens: Iterable[int]) -> bool:
        return bool(self.closure_mask(gens).all())

    def is_subgroup(self, elts: Iterable[int]) -> bool:
        e = np.fromiter(elts, dtype=np.int64)
        if e.size == 0:
            return False
        mask = np.zeros(self._n, dtype=bool)
        mask[e] = True
        return bool(mask[0] and mask[self.table[np.ix_(e, e)]].all())

    def centralizer_in(self, subset: Iterable[int], x: int) -> frozenset[int]:
        s = np.fromiter(subset, dtype=np.int64)
        ok = self.table[s, x] == self.table[x, s]
        return frozenset(s[ok].tolist())

    def centralizer(self, x: int) -> frozenset[int]:
        return self.centralizer_in(range(self._n), x)

    def center(self) -> frozenset[int]:
        t = self.table
        return frozenset(np.flatnonzero((t == t.T).all(axis=1)).tolist())

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def is_abelian_subset(self, elts: Iterable[int]) -> bool:
        e = np.fromiter(elts, dtype=np.int64)
        sub = self.table[np.ix_(e, e)]
        return bool(np.array_equal(sub, sub.T))

    def is_normal(self, elts: Iterable[int]) -> bool:
        e = np.fromiter(elts, dtype=np.int64)
        mask = np.zeros(self._n, dtype=bool)
        mask[e] = True
        conj = self.table[self.table[self.inv][:, e], np.arange(self._n)[:, None]]
        return bool(mask[conj].all())

    def exponent(self) -> int:
        return int(np.lcm.reduce(self.orders.astype(np.int64)))

    def involutions(self) -> list[int]:
        return np.flatnonzero(self.orders == 2).tolist()

    def generating_tuple(self) -> list[int]:
        """Greedy generating tuple: elements by decreasing order, lowest index first."""
        keys = sorted(range(1, self._n), key=lambda e: (-int(self.orders[e]), e))
        mask = self.closure_mask([])
        gens: list[int] = []
        for e in keys:
            if mask.all():
                break
            if not mask[e]:
                gens.append(e)
                mask = self.closure_mask(gens)
        return gens

    # -- printing ---------------------------------------------------------
    def word(self, e: int) -> str:
        """Shortest word for ``e`` in the named generators (BFS, lowest index first)."""
        if self._words is None:
            self._words = self._compute_words()
        return self._words[e]

    def _compute_words(self) -> list[str]:
        gens = self.generators or {f"g{i}": g for i, g in enumerate(self.generating_tuple())}
        words: list[str | None] = [None] * self._n
        words[0] = "1"
        paths: list[list[str]] = [[] for _ in range(self._n)]
        queue = deque([0])
        items = list(gens.items())
        while queue:
            x = queue.popleft()
            for name, g in items:
                y = int(self.table[x, g])
                if words[y] is None:
                    paths[y] = paths[x] + [name]
                    words[y] = _compress(paths[y])
                    queue.append(y)
        return [w if w is not None else f"?{i}" for i, w in enumerate(words)]


def _compress(names: list[str]) -> str:
    out = []
    i = 0
    while i < len(names):
        j = i
        while j < len(names) and names[j] == names[i]:
            j += 1
        k = j - i
        out.append(names[i] if k == 1 else f"{names[i]}^{k}")
        i = j
    return "*".join(out)


def _element_orders(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    ar = np.arange(n)
    orders = np.zeros(n, dtype=np.int32)
    cur = ar.copy()
    k = 1
    while (orders == 0).any():
        hit = (cur == 0) & (orders == 0)
        orders[hit] = k
        cur = table[cur, ar]
        k += 1
        if k > n + 1:
            raise ValidationError("element orders do not terminate")
    return orders


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def from_generators(identity: Hashable, gens: Sequence[Hashable],
                    mul: Callable[[Hashable, Hashable], Hashable],
                    name: str = "G", names: Sequence[str] | None = None,
                    validate: bool = True, limit: int = 1 << 16) -> tuple[FiniteGroup, list]:
    """Build the group generated by ``gens`` under ``mul``.

    Returns the group and the list of underlying objects (index -> object).
    Only ``|G| * len(gens)`` products are evaluated; the rest of the table is
    filled by right-multiplication permutations.
    """
    elems = [identity]
    index = {identity: 0}
    right = [[] for _ in gens]
    parent = [(-1, -1)]
    i = 0
    while i < len(elems):
        x = elems[i]
        for j, g in enumerate(gens):
            y = mul(x, g)
            k = index.get(y)
            if k is None:
                k = len(elems)
                if k >= limit:
                    raise ArgumentError(f"generated group exceeds {limit} elements")
                index[y] = k
                elems.append(y)
                parent.append((i, j))
            right[j].append(k)
        i += 1
    n = len(elems)
    rperm = np.array(right, dtype=np.int32).reshape(len(gens), n)
    table = table_from_right_action(rperm, parent)
    named = {}
    if names:
        for nm, g in zip(names, gens):
            named[nm] = index[g]
    return FiniteGroup(table, name=name, generators=named, validate=validate), elems


def table_from_right_action(rperms: np.ndarray, parent: Sequence[tuple[int, int]] | None = None) -> np.ndarray:
    """Multiplication table of a regular action given by right-multiplication permutations.

    Point 0 is the identity; ``rperms[j][x]`` is ``x * gen_j``.  ``parent[h]``
    may give ``(p, j)`` with ``h = p * gen_j``; otherwise a BFS tree is used.
    """
    rperms = np.asarray(rperms)
    n = rperms.shape[1]
    if parent is None:
        parent = [(-1, -1)] * n
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for j in range(rperms.shape[0]):
                y = int(rperms[j, x])
                if not seen[y]:
                    seen[y] = True
                    parent[y] = (x, j)
                    queue.append(y)
        if not seen.all():
            raise ValidationError("action is not transitive")
    table = np.empty((n, n), dtype=np.int32)
    table[:, 0] = np.arange(n)
    order = sorted(range(1, n), key=lambda h: _depth(parent, h))
    for h in order:
        p, j = parent[h]
        table[:, h] = rperms[j][table[:, p]]
    return table


def _depth(parent, h):
    d = 0
    while h > 0:
        h = parent[h][0]
        d += 1
    return d


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ArgumentError("cyclic group order must be positive")
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, name=f"C{n}",
                       generators={"a": 1} if n > 1 else {}, validate=False)


def elementary_abelian(k: int) -> FiniteGroup:
    if k < 0:
        raise ArgumentError("rank must be non-negative")
    ar = np.arange(1 << k)
    gens = {f"e{i + 1}": 1 << i for i in range(k)}
    return FiniteGroup(ar[:, None] ^ ar[None, :], name=f"C2^{k}", generators=gens,
                       validate=False)


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """Element ``(g, h)`` has index ``g*|H| + h``."""
    n, m = G.order, H.order
    t = (G.table[:, None, :, None].astype(np.int64) * m + H.table[None, :, None, :])
    gens = {}
    used = set()
    for nm, g in G.generators.items():
        gens[nm] = g * m
        used.add(nm)
    for nm, h in H.generators.items():
        key = nm if nm not in used else nm + "'"
        gens[key] = h
    return FiniteGroup(t.reshape(n * m, n * m), name=name or f"{G.name}x{H.name}",
                       generators=gens, validate=False)


def abelian(orders: Sequence[int], name: str | None = None) -> FiniteGroup:
    """Direct product of cyclic groups; generator ``a{i}`` is the i-th factor's generator."""
    G = cyclic(1)
    for o in orders:
        G = direct_product(G, cyclic(o))
    stride = 1
    gens = {}
    for i in range(len(orders) - 1, -1, -1):
        if orders[i] > 1:
            gens[f"a{i + 1}"] = stride
        stride *= orders[i]
    gens = dict(sorted(gens.items(), key=lambda kv: int(kv[0][1:])))
    label = name or "x".join(f"C{o}" for o in orders)
    return FiniteGroup(G.table, name=label, generators=gens, validate=False)


_QUNIT = {  # (u, v) -> (sign, unit) for units 0=1, 1=i, 2=j, 3=k
    (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
    (1, 2): (1, 3), (2, 1): (-1, 3), (2, 3): (1, 1), (3, 2): (-1, 1),
    (3, 1): (1, 2), (1, 3): (-1, 2),
}


def quaternion8() -> FiniteGroup:
    """Q8 with indices 0:1, 1:-1, 2:i, 3:-i, 4:j, 5:-j, 6:k, 7:-k."""
    def enc(sign, unit):
        return 2 * unit + (0 if sign > 0 else 1)

    table = np.zeros((8, 8), dtype=np.int32)
    for x in range(8):
        ux, sx = divmod(x, 2)
        for y in range(8):
            uy, sy = divmod(y, 2)
            sign = (-1) ** (sx + sy)
            if ux == 0 or uy == 0:
                unit = ux or uy
            else:
                s, unit = _QUNIT[(ux, uy)]
                sign *= s
            table[x, y] = enc(sign, unit)
    return FiniteGroup(table, name="Q8", generators={"i": 2, "j": 4}, validate=False)


def generalized_dihedral(A: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """``<tau, A>``; index ``a`` is ``a`` and index ``|A| + a`` is ``tau*a``."""
    if not A.is_abelian():
        raise ArgumentError("generalised dihedral groups need an abelian base")
    m = A.order
    t = A.table.astype(np.int64)
    tinv = t[A.inv]                      # (a, b) -> a^-1 b
    table = np.block([[t, m + tinv], [m + t, tinv]])
    gens = dict(A.generators)
    gens["t"] = m
    return FiniteGroup(table, name=name or f"Dih({A.name})", generators=gens, validate=False)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n."""
    return generalized_dihedral(cyclic(n), name=f"D{n}")


def quotient(G: FiniteGroup, K: Iterable[int], name: str | None = None) -> tuple[FiniteGroup, np.ndarray]:
    """``G/K`` for a normal subgroup ``K``; returns the group and the coset map."""
    K = sorted(set(K))
    if not G.is_subgroup(K) or not G.is_normal(K):
        raise ArgumentError("quotient needs a normal subgroup")
    n = G.order
    coset = np.full(n, -1, dtype=np.int64)
    reps = []
    kk = np.array(K)
    for g in range(n):
        if coset[g] < 0:
            coset[G.table[g, kk]] = len(reps)
            reps.append(g)
    reps = np.array(reps)
    table = coset[G.table[np.ix_(reps, reps)]]
    gens = {}
    for nm, g in G.generators.items():
        if coset[g] != 0:
            gens.setdefault(nm, int(coset[g]))
    return FiniteGroup(table, name=name or f"{G.name}/K", generators=gens), coset


def subgroup_as_group(G: FiniteGroup, elts: Iterable[int], name: str | None = None) -> tuple[FiniteGroup, np.ndarray]:
    """Relabel a subgroup as a standalone group; returns it and the index map new -> old."""
    e = np.array(sorted(set(elts)))
    if e.size == 0 or e[0] != 0 or not G.is_subgroup(e):
        raise ArgumentError("not a subgroup")
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[e] = np.arange(e.size)
    table = pos[G.table[np.ix_(e, e)]]
    gens = {nm: int(pos[g]) for nm, g in G.generators.items() if pos[g] >= 0}
    return FiniteGroup(table, name=name or f"sub({G.name})", generators=gens, validate=False), e


def central_product_D4D4() -> FiniteGroup:
    """``D4 o D4``: the extraspecial group of order 32 of plus type."""
    D = dihedral(4)
    P = direct_product(D, D)
    z = 2  # rotation squared, the central involution of D4
    Q, _ = quotient(P, [0, z * 8 + z], name="D4oD4")
    return Q


def permutation_group(gens: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """Group generated by permutations given as image tuples (acting on the right)."""
    gens = [tuple(int(x) for x in g) for g in gens]
    if not gens:
        return cyclic(1)
    deg = len(gens[0])
    ident = tuple(range(deg))

    def mul(p, q):  # apply p then q
        return tuple(q[i] for i in p)

    G, _ = from_generators(ident, gens, mul, name=name,
                           names=[f"p{i + 1}" for i in range(len(gens))])
    return G


# ---------------------------------------------------------------------------
# structural queries
# ---------------------------------------------------------------------------

def squares_subgroup(G: FiniteGroup) -> np.ndarray:
    """Mask of the subgroup generated by all squares (contains the derived subgroup)."""
    sq = np.unique(G.table[np.arange(G.order), np.arange(G.order)])
    return G.closure_mask(sq.tolist())


def mod2_coordinates(G: FiniteGroup, kernel_mask: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Coordinates of ``G/K`` over GF(2) for ``K`` containing all squares.

    Returns an int array of bitmask coordinates per element and the list of
    basis elements (lowest index first).
    """
    n = G.order
    coord = np.full(n, -1, dtype=np.int64)
    coord[kernel_mask] = 0
    basis: list[int] = []
    span = kernel_mask.copy()
    for e in range(n):
        if span[e]:
            continue
        bit = 1 << len(basis)
        basis.append(e)
        cur = np.flatnonzero(span)
        new = G.table[cur, e]
        coord[new] = coord[cur] | bit
        span[new] = True
    return coord, basis


def is_generalized_dihedral(G: FiniteGroup) -> tuple[bool, tuple[frozenset[int], int] | None]:
    """Decide whether ``G`` is generalised dihedral; witness ``(A, tau)`` when it is.

    ``G`` is generalised dihedral over ``A`` exactly when ``A`` has index 2 and
    every element outside ``A`` is an involution; inversion of ``A`` is then
    conjugation by any outside element, which forces ``A`` abelian.
    """
    n = G.order
    if n < 2 or int((G.orders == 2).sum()) < n // 2:
        return False, None
    K = squares_subgroup(G)
    coord, basis = mod2_coordinates(G, K)
    r = len(basis)
    inv2 = G.orders == 2
    for mask in range(1, 1 << r):
        outside = (np.bitwise_count(coord & mask) & 1).astype(bool)
        if inv2[outside].all():
            A = frozenset(np.flatnonzero(~outside).tolist())
            tau = int(np.flatnonzero(outside)[0])
            return True, (A, tau)
    return False, None


def element_invariants(G: FiniteGroup) -> np.ndarray:
    """Per-element isomorphism invariants: order, centraliser size, square-root count."""
    n = G.order
    t = G.table
    cent = (t == t.T).sum(axis=1)
    sq = t[np.arange(n), np.arange(n)]
    roots = np.bincount(sq, minlength=n)
    return np.stack([G.orders, cent, roots], axis=1)


class HomSearch:
    """Backtracking search for isomorphisms ``G -> H`` defined on a generating tuple.

    Partial assignments are checked on the subgroup generated by the assigned
    prefix: the induced map must be well defined and injective there.
    """

    def __init__(self, G: FiniteGroup, H: FiniteGroup, gens: Sequence[int] | None = None):
        self.G, self.H = G, H
        self.gens = list(gens) if gens is not None else G.generating_tuple()
        self.inv_G = element_invariants(G)
        self.inv_H = element_invariants(H)
        keyed: dict[tuple, list[int]] = {}
        for h in range(H.order):
            keyed.setdefault(tuple(self.inv_H[h]), []).append(h)
        self.candidates = [keyed.get(tuple(self.inv_G[g]), []) for g in self.gens]
        self._layers = [self._bfs_layers(j) for j in range(len(self.gens))]
        self.nodes = 0

    def _bfs_layers(self, j):
        """BFS tree of <gens[0..j]>: list of (children, parents, gen_idx) layers and members."""
        G = self.G
        gens = self.gens[:j + 1]
        seen = np.zeros(G.order, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        layers = []
        while frontier.size:
            ch, pa, gi = [], [], []
            for k, g in enumerate(gens):
                y = G.table[frontier, g]
                for x, yy in zip(frontier.tolist(), y.tolist()):
                    if not seen[yy]:
                        seen[yy] = True
                        ch.append(yy)
                        pa.append(x)
                        gi.append(k)
            if not ch:
                break
            layers.append((np.array(ch), np.array(pa), np.array(gi)))
            frontier = np.array(ch)
        return layers, np.flatnonzero(seen)

    def extend_ok(self, images: Sequence[int]) -> np.ndarray | None:
        """Map on ``<gens[:len(images)]>`` if consistent and injective, else None."""
        j = len(images) - 1
        layers, members = self._layers[j]
        G, H = self.G, self.H
        phi = np.full(G.order, -1, dtype=np.int64)
        phi[0] = 0
        img = np.array(images)
        for ch, pa, gi in layers:
            phi[ch] = H.table[phi[pa], img[gi]]
        vals = phi[members]
        if np.unique(vals).size != members.size:
            return None
        for k in range(j + 1):
            lhs = phi[G.table[members, self.gens[k]]]
            rhs = H.table[vals, img[k]]
            if not np.array_equal(lhs, rhs):
                return None
        return phi

    def search(self, prefix: Sequence[int] = (), deadline: float | None = None):
        """Yield full isomorphisms (as arrays) extending ``prefix``, in lexicographic order."""
        import time
        r = len(self.gens)
        images = list(prefix)
        if images and self.extend_ok(images) is None:
            return
        if self.G.order != self.H.order:
            return

        def rec(pos):
            if deadline is not None and time.monotonic() > deadline:
                from .errors import SearchTimeout
                raise SearchTimeout("homomorphism search timed out", self.nodes)
            if pos == r:
                phi = self.extend_ok(images) if images else np.zeros(1, dtype=np.int64)
                if phi is not None and (phi >= 0).all():
                    yield phi
                return
            for c in self.candidates[pos]:
                self.nodes += 1
                images.append(c)
                if self.extend_ok(images) is not None:
                    yield from rec(pos + 1)
                images.pop()

        yield from rec(len(images))


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> tuple[bool, np.ndarray | None]:
    """Decide ``G ~ H``; the witness maps element indices of G to H."""
    if G.order != H.order:
        return False, None
    if G.order == 1:
        return True, np.zeros(1, dtype=np.int64)
    a, b = element_invariants(G), element_invariants(H)
    if not np.array_equal(np.unique(a, axis=0, return_counts=True)[1],
                          np.unique(b, axis=0, return_counts=True)[1]) or \
            not np.array_equal(np.unique(a, axis=0), np.unique(b, axis=0)):
        return False, None
    search = HomSearch(G, H)
    for phi in search.search():
        return True, phi
    return False, None


def invariant_factor_decomposition(A: FiniteGroup) -> list[tuple[int, int]]:
    """Generators ``a_1..a_m`` with ``A = <a_1> x ... x <a_m>`` and ``o(a_{i+1}) | o(a_i)``."""
    if not A.is_abelian():
        raise ArgumentError("invariant factors need an abelian group")
    n = A.order
    ar = np.arange(n)
    span = np.zeros(n, dtype=bool)
    span[0] = True
    factors: list[tuple[int, int]] = []
    while not span.all():
        # order of each element modulo the current span
        cord = np.zeros(n, dtype=np.int64)
        cur = ar.copy()
        k = 1
        while (cord == 0).any():
            hit = span[cur] & (cord == 0)
            cord[hit] = k
            cur = A.table[cur, ar]
            k += 1
        m = int(cord.max())
        x = int(np.flatnonzero(cord == m)[0])
        coset = np.sort(A.table[x, np.flatnonzero(span)])
        y = int(coset[A.orders[coset] == m][0])
        factors.append((y, m))
        span = A.closure_mask(np.flatnonzero(span).tolist() + [y])
    return factors


class F2Span:
    """Incremental span of GF(2) vectors stored as int bitmasks."""

    def __init__(self):
        self.pivots: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            hb = v.bit_length() - 1
            p = self.pivots.get(hb)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        r = self.reduce(v)
        if r:
            self.pivots[r.bit_length() - 1] = r
            return True
        return False

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self.pivots)


def elementary_abelian_coordinates(G: FiniteGroup, elts: Iterable[int]) -> tuple[list[int], dict[int, int]]:
    """Basis (lowest index first) and bitmask coordinates for an elementary abelian subgroup."""
    elts = sorted(set(elts))
    if not G.is_subgroup(elts) or not G.is_abelian_subset(elts) or \
            any(G.orders[e] > 2 for e in elts):
        raise ArgumentError("not an elementary abelian subgroup")
    basis: list[int] = []
    coord = {0: 0}
    for e in elts:
        if e in coord:
            continue
        bit = 1 << len(basis)
        basis.append(e)
        for x, c in list(coord.items()):
            coord[int(G.table[x, e])] = c | bit
    return basis, coord


def decompose_involution_module(G: FiniteGroup, V: Iterable[int], act) -> tuple[list[tuple[int, int]], list[int]]:
    """Split an elementary abelian ``V`` under an involutory automorphism.

    Returns pairs ``(v_i, w_i)`` with ``act(v_i) = w_i`` and fixed vectors
    ``e_j`` such that all of them form a basis of ``V``.
    """
    act = np.asarray(act)
    V = sorted(set(V))
    basis, coord = elementary_abelian_coordinates(G, V)
    elem = {c: e for e, c in coord.items()}
    for e in V:
        if int(act[e]) not in coord:
            raise ValidationError("action does not preserve V")
        if int(act[act[e]]) != e:
            raise ValidationError("action is not involutory")
        c = coord[e]
        want = 0
        for i, b in enumerate(basis):
            if c >> i & 1:
                want ^= coord[int(act[b])]
        if coord[int(act[e])] != want:
            raise ValidationError("action is not an automorphism of V")
    img = F2Span()
    pairs: list[tuple[int, int]] = []
    for e in V:
        u = coord[e] ^ coord[int(act[e])]
        if u and img.add(u):
            pairs.append((e, int(act[e])))
    full = F2Span()
    for v, w in pairs:
        full.add(coord[v])
        full.add(coord[w])
    fixed: list[int] = []
    for e in V:
        if int(act[e]) == e and full.add(coord[e]):
            fixed.append(e)
    if 2 * len(pairs) + len(fixed) != len(basis):
        raise ValidationError("module decomposition did not produce a basis")
    del elem
    return pairs, fixed


def half_inversion_set(G: FiniteGroup, N: Iterable[int], conj) -> tuple[frozenset[int], Fraction]:
    """Elements of ``N`` inverted by the automorphism ``conj`` and their proportion."""
    conj = np.asarray(conj)
    N = np.array(sorted(set(N)))
    mask = np.zeros(G.order, dtype=bool)
    mask[N] = True
    img = conj[N]
    if not mask[img].all() or np.unique(img).size != N.size:
        raise ValidationError("map is not a permutation of N")
    if not np.array_equal(conj[G.table[np.ix_(N, N)]], G.table[np.ix_(img, img)]):
        raise ValidationError("map is not an automorphism of N")
    H = N[img == G.inv[N]]
    return frozenset(H.tolist()), Fraction(int(H.size), int(N.size))


# ---------------------------------------------------------------------------
# structural witnesses
# ---------------------------------------------------------------------------

def center_of_subgroup(G: FiniteGroup, N: Iterable[int]) -> frozenset[int]:
    n = np.array(sorted(set(N)))
    sub = G.table[np.ix_(n, n)]
    return frozenset(n[(sub == sub.T).all(axis=1)].tolist())


@dataclass(frozen=True)
class CaseIIWitness:
    """``A < N < G`` with ``|G:N| = |N:A| = 2``, ``g`` an involution inverting ``A``
    and ``n``, and ``A`` abelian."""
    group: FiniteGroup
    A: frozenset
    N: frozenset
    g: int
    n: int

    def validate(self) -> "CaseIIWitness":
        G, A, N, g, n = self.group, self.A, self.N, self.g, self.n
        if not (G.is_subgroup(A) and G.is_subgroup(N) and A < N):
            raise ValidationError("A and N must be nested subgroups")
        if 2 * len(N) != G.order or 2 * len(A) != len(N):
            raise ValidationError("indices |G:N| and |N:A| must both be 2")
        if not G.is_abelian_subset(A):
            raise ValidationError("A is not abelian")
        if not G.is_normal(N):
            raise ValidationError("N is not normal")
        if g in N or G.mul(g, g) != 0:
            raise ValidationError("g must be an involution outside N")
        if n not in N or n in A:
            raise ValidationError("n must lie in N \\ A")
        if G.conj(n, g) != int(G.inv[n]):
            raise ValidationError("g does not invert n")
        cg = G.conjugation_map(g)
        a = np.array(sorted(A))
        if not np.array_equal(cg[a], G.inv[a]):
            raise ValidationError("g does not invert A")
        return self


@dataclass(frozen=True)
class CaseIIIWitness:
    """Structure of a group whose index-2 subgroup ``N`` is half inverted by ``g``."""
    group: FiniteGroup
    N: frozenset
    g: int
    n0: int
    H: frozenset
    A: frozenset
    x2: int
    x3: int
    x4: int
    d: int
    params: dict = field(default_factory=dict, compare=False)

    def validate(self) -> "CaseIIIWitness":
        G = self.group
        N, A, g = self.N, self.A, self.g
        t = G.table
        if not G.is_subgroup(N) or 2 * len(N) != G.order or not G.is_normal(N):
            raise ValidationError("N must be a normal subgroup of index 2")
        if g in N or G.mul(g, g) != 0:
            raise ValidationError("g must be an involution outside N")
        if len(N) & (len(N) - 1):
            raise ValidationError("N is not a 2-group")
        cg = G.conjugation_map(g)
        H, frac = half_inversion_set(G, N, cg)
        if H != self.H:
            raise ValidationError("H differs from the set of elements inverted by g")
        if frac != Fraction(1, 2):
            raise ValidationError(f"g inverts {frac} of N, not exactly half")
        n0H = frozenset(int(t[self.n0, h]) for h in H)
        if self.n0 not in N or (H & n0H) or (H | n0H) != N:
            raise ValidationError("N is not the disjoint union of H and n0*H")
        if not (A <= N and G.is_subgroup(A) and G.is_abelian_subset(A) and 4 * len(A) == len(N)):
            raise ValidationError("A must be an abelian subgroup of index 4 in N")
        if not G.is_normal(A):
            raise ValidationError("A is not normal in G")
        Q, coset = quotient(G, A)
        if Q.order != 8 or not (Q.orders <= 2).all():
            raise ValidationError("G/A is not elementary abelian of order 8")
        if len({int(coset[x]) for x in N}) != 4:
            raise ValidationError("N/A does not have order 4")
        if cg[self.x3] != G.inv[self.x3] or cg[self.x4] != G.inv[self.x4]:
            raise ValidationError("g does not invert x3 and x4")
        zn = center_of_subgroup(G, N)
        if G.centralizer_in(A, self.x3) != zn or G.centralizer_in(A, self.x4) != zn:
            raise ValidationError("C_A(x3) and C_A(x4) must both equal Z(N)")
        if not zn <= A or 2 * len(zn) != len(A):
            raise ValidationError("Z(N) must have index 2 in A")
        if self.d != G.commutator(self.x4, self.x3) or self.d == 0:
            raise ValidationError("d must be the non-trivial commutator [x4, x3]")
        if int(coset[self.x2]) != int(coset[t[self.x3, self.x4]]) or int(coset[self.n0]) != int(coset[self.x2]):
            raise ValidationError("x2 and n0 must lie in the coset x3*x4*A")
        return self

    @property
    def center_N(self) -> frozenset:
        return center_of_subgroup(self.group, self.N)

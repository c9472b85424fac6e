"""Cayley digraphs and small digraph utilities.

In ``Cay(G, S)`` the pair ``(x, y)`` is an arc iff ``y * x^-1`` lies in ``S``,
so the out-neighbours of ``x`` are ``s * x`` for ``s`` in ``S``.  Right
multiplication by any group element is then an automorphism.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ParseError
from .groups import FiniteGroup


class ConnectionSet:
    """An immutable subset of a group; every flag is derived from the members."""

    def __init__(self, group: FiniteGroup, members: Iterable[int]):
        m = sorted({int(x) for x in members})
        if m and (m[0] < 0 or m[-1] >= group.order):
            raise ArgumentError("connection set element out of range")
        self.group = group
        self.members = tuple(m)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.member_set

    def __eq__(self, other):
        return isinstance(other, ConnectionSet) and other.group is self.group and \
            other.members == self.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"ConnectionSet({list(self.members)})"

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @property
    def contains_identity(self) -> bool:
        return 0 in self.member_set

    @cached_property
    def antisymmetric(self) -> bool:
        inv = self.group.inv
        return not any(int(inv[s]) in self.member_set for s in self.members)

    @cached_property
    def inverse_closed(self) -> bool:
        inv = self.group.inv
        return all(int(inv[s]) in self.member_set for s in self.members)

    @cached_property
    def generates(self) -> bool:
        return self.group.generates(self.members)

    def words(self) -> list[str]:
        return [self.group.word(s) for s in self.members]


def is_oriented(S: ConnectionSet) -> bool:
    return S.antisymmetric


def is_connected_as_cayley(S: ConnectionSet) -> bool:
    return S.generates


class Digraph:
    """A simple digraph on vertices ``0..n-1`` with sorted neighbour arrays.

    ``labels`` records original vertex names for induced subdigraphs.
    """

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = (), labels: Sequence[int] | None = None):
        arr = np.array(list(arcs), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ArgumentError("arc endpoint out of range")
        arr = np.unique(arr, axis=0) if arr.size else arr
        self.n = n
        self.labels = list(labels) if labels is not None else list(range(n))
        self._set_lists(arr)

    def _set_lists(self, arr):
        n = self.n
        outs = [[] for _ in range(n)]
        ins = [[] for _ in range(n)]
        for u, v in arr.tolist():
            outs[u].append(v)
            ins[v].append(u)
        self.out_pad = _pad(outs)
        self.in_pad = _pad(ins)

    @cached_property
    def out_lists(self) -> list[np.ndarray]:
        return [np.sort(r[r >= 0]) for r in self.out_pad]

    @cached_property
    def in_lists(self) -> list[np.ndarray]:
        return [np.sort(r[r >= 0]) for r in self.in_pad]

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense boolean out-adjacency matrix (row = tail)."""
        a = np.zeros((self.n, self.n), dtype=bool)
        rows = np.repeat(np.arange(self.n), self.out_pad.shape[1])
        cols = self.out_pad.ravel()
        ok = cols >= 0
        a[rows[ok], cols[ok]] = True
        return a

    @cached_property
    def packed_out(self) -> np.ndarray:
        """Out-neighbourhoods as packed bitsets, one row of bytes per vertex."""
        return np.packbits(self.adjacency, axis=1)

    @cached_property
    def packed_in(self) -> np.ndarray:
        return np.packbits(self.adjacency.T, axis=1)

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def arcs(self) -> np.ndarray:
        u, v = np.nonzero(self.adjacency)
        return np.stack([u, v], axis=1)

    @property
    def num_arcs(self) -> int:
        return int((self.out_pad >= 0).sum())

    def out_degree(self) -> np.ndarray:
        return (self.out_pad >= 0).sum(axis=1)

    def in_degree(self) -> np.ndarray:
        return (self.in_pad >= 0).sum(axis=1)

    def has_digon(self) -> bool:
        a = self.adjacency
        return bool((a & a.T).any())

    def is_automorphism(self, perm) -> bool:
        """Independent arc-preservation check for a vertex permutation."""
        p = np.asarray(perm)
        if p.shape != (self.n,) or not np.array_equal(np.sort(p), np.arange(self.n)):
            return False
        a = self.adjacency
        return bool(np.array_equal(a[np.ix_(p, p)], a))

    def to_dot(self) -> str:
        lines = ["digraph {"]
        lines += [f"  {v};" for v in range(self.n)]
        lines += [f"  {u} -> {v};" for u, v in self.arcs().tolist()]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_edges(self) -> str:
        arcs = self.arcs().tolist()
        return "\n".join([f"{self.n} {len(arcs)}"] + [f"{u} {v}" for u, v in arcs]) + "\n"


def _pad(lists) -> np.ndarray:
    width = max((len(x) for x in lists), default=0)
    out = np.full((len(lists), max(width, 1)), -1, dtype=np.int64)
    for i, x in enumerate(lists):
        out[i, :len(x)] = x
    return out[:, :width] if width else out[:, :0]


class CayleyDigraph(Digraph):
    def __init__(self, group: FiniteGroup, conn: ConnectionSet):
        if conn.group is not group:
            raise ArgumentError("connection set belongs to a different group")
        self.group = group
        self.conn = conn
        self.n = group.order
        self.labels = list(range(self.n))
        s = np.array(conn.members, dtype=np.int64)
        t = group.table.astype(np.int64)
        if s.size:
            self.out_pad = t[s].T.copy()                 # (x, s) -> s*x
            self.in_pad = t[group.inv[s].astype(np.int64)].T.copy()
        else:
            self.out_pad = np.zeros((self.n, 0), dtype=np.int64)
            self.in_pad = np.zeros((self.n, 0), dtype=np.int64)

    def __repr__(self):
        return f"CayleyDigraph({self.group.name}, |S|={len(self.conn)})"


def cayley(G: FiniteGroup, S: ConnectionSet | Iterable[int]) -> CayleyDigraph:
    if not isinstance(S, ConnectionSet):
        S = ConnectionSet(G, S)
    return CayleyDigraph(G, S)


def induced_subdigraph(D: Digraph, X: Iterable[int]) -> Digraph:
    """Arcs of ``D`` with both ends in ``X``; vertex ``i`` of the result is ``sorted(X)[i]``."""
    X = sorted(set(int(x) for x in X))
    pos = {x: i for i, x in enumerate(X)}
    arcs = []
    for x in X:
        for y in D.out_pad[x]:
            y = int(y)
            if y >= 0 and y in pos:
                arcs.append((pos[x], pos[y]))
    return Digraph(len(X), arcs, labels=[D.labels[x] for x in X])


def components(D: Digraph) -> list[list[int]]:
    """Weak components, each sorted, ordered by smallest vertex."""
    seen = np.zeros(D.n, dtype=bool)
    out = []
    for s in range(D.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        q = deque([s])
        while q:
            x = q.popleft()
            for y in np.concatenate([D.out_pad[x], D.in_pad[x]]).tolist():
                if y >= 0 and not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    q.append(y)
        out.append(sorted(comp))
    return out


def weakly_connected(D: Digraph) -> bool:
    return D.n == 0 or len(components(D)) == 1


def mutual_inneighbours(D: CayleyDigraph, u: int, v: int, via: Iterable[int]) -> frozenset[int]:
    """Vertices ``w`` with arcs ``w -> u`` and ``w -> v`` both labelled by elements of ``via``."""
    if u == v:
        raise ArgumentError("mutual in-neighbours need distinct vertices")
    G = D.group
    via = np.array(sorted(set(via) & D.conn.member_set), dtype=np.int64)
    if via.size == 0:
        return frozenset()
    inv = G.inv[via]
    from_u = set(G.table[inv, u].tolist())
    from_v = set(G.table[inv, v].tolist())
    return frozenset(from_u & from_v)


def load_digraph(text: str) -> Digraph:
    """Parse the edge-list format: ``n m`` then ``u v`` per arc."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ArgumentError("edge list must start with 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        arcs = []
        for i, r in enumerate(rows[1:]):
            if len(r) != 2:
                raise ParseError(f"arc line {i + 1} needs two vertices")
            arcs.append((int(r[0]), int(r[1])))
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"non-integer entry in edge list: {e}") from None
    if len(arcs) != m:
        raise ArgumentError(f"edge list declares {m} arcs but has {len(arcs)}")
    return Digraph(n, arcs)

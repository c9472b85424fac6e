"""Digraph automorphisms by colour refinement and individualisation.

Partitions are vertex colourings whose colour numbers are canonical: they
depend only on the structure, never on vertex labels, so two branches of
the search tree can be compared cell by cell.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .digraph import Digraph
from .errors import ArgumentError, ResourceError, SearchTimeout, ValidationError

DEFAULT_TIMEOUT = 3600.0
ORACLE_LIMIT = 512


class OrderedPartition:
    """Cells listed in colour order; ``colour[v]`` is the index of the cell holding ``v``."""

    def __init__(self, colour):
        colour = np.asarray(colour, dtype=np.int64)
        _, self.colour = np.unique(colour, return_inverse=True)
        self.colour = self.colour.ravel()

    @classmethod
    def unit(cls, n: int) -> "OrderedPartition":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_cells(cls, n: int, cells) -> "OrderedPartition":
        colour = np.full(n, -1, dtype=np.int64)
        for i, cell in enumerate(cells):
            colour[list(cell)] = i
        if (colour < 0).any():
            raise ArgumentError("cells must cover every vertex")
        return cls(colour)

    @property
    def cells(self) -> list[list[int]]:
        k = int(self.colour.max()) + 1 if self.colour.size else 0
        order = np.argsort(self.colour, kind="stable")
        bounds = np.searchsorted(self.colour[order], np.arange(k + 1))
        return [order[bounds[i]:bounds[i + 1]].tolist() for i in range(k)]

    def __len__(self):
        return int(self.colour.max()) + 1 if self.colour.size else 0

    @property
    def discrete(self) -> bool:
        return len(self) == self.colour.size

    def individualise(self, v: int) -> "OrderedPartition":
        c = 2 * self.colour
        c[v] += 1
        return OrderedPartition(c)

    def __eq__(self, other):
        return isinstance(other, OrderedPartition) and np.array_equal(self.colour, other.colour)


def refine_colours(D: Digraph, colour: np.ndarray) -> np.ndarray:
    """Coarsest equitable refinement of a canonical colouring.

    Each round gives a vertex the key (colour, sorted out-colours, sorted
    in-colours); keys are ranked lexicographically so the result never
    merges cells and keeps their relative order.
    """
    c = colour
    k = int(c.max()) + 1 if c.size else 0
    out_pad, in_pad = D.out_pad, D.in_pad
    while True:
        ce = np.append(c, -1)
        key = np.concatenate([c[:, None], np.sort(ce[out_pad], axis=1),
                              np.sort(ce[in_pad], axis=1)], axis=1)
        uniq, new = np.unique(key, axis=0, return_inverse=True)
        new = new.ravel()
        if len(uniq) == k:
            return new
        c, k = new, len(uniq)


def refine(D: Digraph, pi: OrderedPartition) -> OrderedPartition:
    out = OrderedPartition.__new__(OrderedPartition)
    out.colour = refine_colours(D, pi.colour)
    return out


@dataclass
class StabiliserReport:
    trivial: bool
    witness: list[int] | None = None
    nodes_explored: int = 0
    elapsed: float = 0.0
    base: int = 0

    def cycles(self) -> str:
        """Witness in one-line cycle notation, fixed points omitted."""
        if self.witness is None:
            return "()"
        return cycle_notation(self.witness)


def cycle_notation(perm) -> str:
    perm = list(perm)
    seen = [False] * len(perm)
    parts = []
    for i in range(len(perm)):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


@dataclass
class _Level:
    colour: np.ndarray       # equitable colouring before individualising
    target: int              # colour of the target cell
    cell: np.ndarray         # vertices of the target cell, ascending
    vertex: int              # vertex individualised on the first path


class _Search:
    def __init__(self, D: Digraph, start: np.ndarray, deadline: float | None):
        self.D = D
        self.deadline = deadline
        self.nodes = 0
        self.levels: list[_Level] = []
        c = refine_colours(D, start)
        while len(np.unique(c)) < D.n:
            tgt = _target_colour(c)
            cell = np.flatnonzero(c == tgt)
            v = int(cell[0])
            self.levels.append(_Level(c, tgt, cell, v))
            c = refine_colours(D, _individualise(c, v))
            self.nodes += 1
        self.leaf = c
        self.leaf_inv = np.argsort(c)   # colour -> vertex on the first path
        self.hist = [np.bincount(lv.colour, minlength=D.n) for lv in self.levels] + \
            [np.bincount(c, minlength=D.n)]

    def tick(self):
        self.nodes += 1
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchTimeout("automorphism search timed out", self.nodes)

    def branch(self, i: int, w: int) -> np.ndarray | None:
        """Search for an automorphism fixing the first ``i`` path vertices and sending ``vertex_i`` to ``w``."""
        c = refine_colours(self.D, _individualise(self.levels[i].colour, w))
        self.tick()
        return self._descend(i + 1, c)

    def _descend(self, depth: int, c: np.ndarray) -> np.ndarray | None:
        if not np.array_equal(np.bincount(c, minlength=self.D.n), self.hist[depth]):
            return None
        if depth == len(self.levels):
            perm = np.empty(self.D.n, dtype=np.int64)
            perm[self.leaf_inv] = np.argsort(c)
            return perm if self.D.is_automorphism(perm) else None
        tgt = self.levels[depth].target
        for u in np.flatnonzero(c == tgt).tolist():
            c2 = refine_colours(self.D, _individualise(c, u))
            self.tick()
            found = self._descend(depth + 1, c2)
            if found is not None:
                return found
        return None


def _individualise(c: np.ndarray, v: int) -> np.ndarray:
    c2 = 2 * c
    c2[v] += 1
    _, c2 = np.unique(c2, return_inverse=True)
    return c2.ravel()


def _target_colour(c: np.ndarray) -> int:
    sizes = np.bincount(c)
    sizes = np.where(sizes > 1, sizes, np.iinfo(np.int64).max)
    return int(np.argmin(sizes))


def _deadline(timeout):
    return None if timeout is None else time.monotonic() + timeout


def stabiliser_is_trivial(D: Digraph, base: int = 0, timeout: float | None = DEFAULT_TIMEOUT) -> StabiliserReport:
    """Is the stabiliser of ``base`` in ``Aut(D)`` trivial?  A witness is returned when not."""
    if D.n == 0:
        raise ArgumentError("empty digraph")
    if not 0 <= base < D.n:
        raise ArgumentError("base vertex out of range")
    t0 = time.monotonic()
    start = np.zeros(D.n, dtype=np.int64)
    start[base] = 1
    s = _Search(D, start, _deadline(timeout))
    for i in range(len(s.levels) - 1, -1, -1):
        lv = s.levels[i]
        for w in lv.cell.tolist():
            if w == lv.vertex:
                continue
            perm = s.branch(i, w)
            if perm is not None:
                if perm[base] != base or not D.is_automorphism(perm) or \
                        np.array_equal(perm, np.arange(D.n)):
                    raise ValidationError("search produced an invalid witness")
                return StabiliserReport(False, perm.tolist(), s.nodes, time.monotonic() - t0, base)
    return StabiliserReport(True, None, s.nodes, time.monotonic() - t0, base)


@dataclass
class AutomorphismGroup:
    generators: list[list[int]]
    order: int
    orbits_by_level: list[int] = field(default_factory=list)


def _generators(D: Digraph, start: np.ndarray, timeout) -> AutomorphismGroup:
    s = _Search(D, start, _deadline(timeout))
    gens: list[np.ndarray] = []
    order = 1
    sizes = []
    for i in range(len(s.levels) - 1, -1, -1):
        lv = s.levels[i]
        orbit = _orbit(lv.vertex, gens, D.n)
        for w in lv.cell.tolist():
            if w in orbit:
                continue
            perm = s.branch(i, w)
            if perm is not None:
                gens.append(perm)
                orbit = _orbit(lv.vertex, gens, D.n)
        sizes.append(len(orbit))
        order *= len(orbit)
    return AutomorphismGroup([g.tolist() for g in gens], order, sizes[::-1])


def _orbit(v: int, gens, n) -> set[int]:
    orbit = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(g[x])
                if y not in orbit:
                    orbit.add(y)
                    nxt.append(y)
        frontier = nxt
    return orbit


def automorphism_group(D: Digraph, timeout: float | None = DEFAULT_TIMEOUT) -> AutomorphismGroup:
    """Generators and exact order of ``Aut(D)`` (oracle scale)."""
    if D.n > ORACLE_LIMIT:
        raise ResourceError(f"automorphism oracle limited to {ORACLE_LIMIT} vertices")
    return _generators(D, np.zeros(D.n, dtype=np.int64), timeout)


def stabiliser_generators(D: Digraph, base: int, timeout: float | None = DEFAULT_TIMEOUT,
                          limit: int | None = ORACLE_LIMIT) -> AutomorphismGroup:
    """Generators of the stabiliser of ``base``; pass ``limit=None`` to lift the size cap."""
    if limit is not None and D.n > limit:
        raise ResourceError(f"automorphism oracle limited to {ORACLE_LIMIT} vertices")
    start = np.zeros(D.n, dtype=np.int64)
    start[base] = 1
    return _generators(D, start, timeout)


def fixed_points_of_stabiliser(D: Digraph, base: int = 0, timeout: float | None = DEFAULT_TIMEOUT) -> frozenset[int]:
    """Vertices fixed by every automorphism that fixes ``base``."""
    gens = stabiliser_generators(D, base, timeout).generators
    fixed = np.ones(D.n, dtype=bool)
    for g in gens:
        fixed &= np.asarray(g) == np.arange(D.n)
    return frozenset(np.flatnonzero(fixed).tolist())

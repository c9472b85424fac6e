"""Permutation groups on small point sets: stabiliser chains and minimal set images."""

from __future__ import annotations

from typing import Iterable, Sequence

Perm = tuple[int, ...]


def compose(p: Perm, q: Perm) -> Perm:
    """Apply ``p`` then ``q``."""
    return tuple(q[x] for x in p)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


class StabChain:
    """Deterministic Schreier-Sims with a prescribed base order.

    Level ``i`` holds the pointwise stabiliser of ``base[:i]``; with the
    default base ``0..n-1`` the levels are exactly what the minimal image
    search needs.
    """

    def __init__(self, n: int, gens: Iterable[Sequence[int]], base: Sequence[int] | None = None):
        self.n = n
        self.identity: Perm = tuple(range(n))
        gens = [tuple(int(x) for x in g) for g in gens]
        gens = [g for g in gens if g != self.identity]
        self.base = list(base) if base is not None else list(range(n))
        k = len(self.base)
        self.gens: list[list[Perm]] = [[] for _ in range(k + 1)]
        self.trans: list[dict[int, Perm]] = [{} for _ in range(k)]
        self.gens[0] = list(gens)
        for i in range(k):
            self._orbit(i)
        self._complete()

    def _orbit(self, i: int) -> None:
        b = self.base[i]
        tr = {b: self.identity}
        frontier = [b]
        while frontier:
            nxt = []
            for x in frontier:
                for s in self.gens[i]:
                    y = s[x]
                    if y not in tr:
                        tr[y] = compose(tr[x], s)
                        nxt.append(y)
            frontier = nxt
        self.trans[i] = tr

    def strip(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for i in range(start, len(self.base)):
            y = g[self.base[i]]
            t = self.trans[i].get(y)
            if t is None:
                return g, i
            g = compose(g, inverse(t))
        return g, len(self.base)

    def _complete(self) -> None:
        k = len(self.base)
        i = k - 1
        while i >= 0:
            restart = None
            for y, t in list(self.trans[i].items()):
                for s in self.gens[i]:
                    ty = self.trans[i][s[y]]
                    sg = compose(compose(t, s), inverse(ty))
                    h, j = self.strip(sg, i + 1)
                    if h != self.identity:
                        for l in range(i + 1, min(j, k - 1) + 1):
                            self.gens[l].append(h)
                            self._orbit(l)
                        restart = j
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = min(restart, k - 1)
                continue
            i -= 1

    @property
    def order(self) -> int:
        out = 1
        for tr in self.trans:
            out *= len(tr)
        return out

    def contains(self, g: Sequence[int]) -> bool:
        h, j = self.strip(tuple(g))
        return j == len(self.base) and h == self.identity

    def elements(self):
        """Iterate over all elements (small groups only)."""
        def rec(i, acc):
            if i < 0:
                yield acc
                return
            for t in self.trans[i].values():
                yield from rec(i - 1, compose(acc, t))
        yield from rec(len(self.base) - 1, self.identity)


class MaskMapper:
    """Apply a permutation to bitmask-encoded point sets using byte lookup tables."""

    def __init__(self, perm: Perm):
        n = len(perm)
        self.tables = []
        for j in range(0, n, 8):
            tab = [0] * 256
            for byte in range(1, 256):
                low = byte & -byte
                bit = low.bit_length() - 1
                x = j + bit
                tab[byte] = tab[byte ^ low] | ((1 << perm[x]) if x < n else 0)
            self.tables.append(tab)

    def __call__(self, mask: int) -> int:
        out = 0
        for tab in self.tables:
            if mask:
                out |= tab[mask & 255]
            mask >>= 8
        return out


class MinimalImage:
    """Lexicographically least image of a point set under a permutation group.

    Sets of equal size compare by their sorted tuples; the search keeps the
    distinct targets of all surviving coset branches level by level.
    """

    def __init__(self, chain: StabChain):
        if chain.base != list(range(chain.n)):
            raise ValueError("minimal images need the base 0..n-1")
        self.chain = chain
        self.levels = []
        for i in range(chain.n):
            tr = chain.trans[i]
            if len(tr) == 1:
                self.levels.append(None)
                continue
            orbit_mask = 0
            maps = []
            for y, t in sorted(tr.items()):
                orbit_mask |= 1 << y
                maps.append((y, MaskMapper(inverse(t))))
            self.levels.append((orbit_mask, maps))

    def _run(self, mask: int, reference: int | None) -> int | None:
        states = {mask}
        image = 0
        size = bin(mask).count("1")
        got = 0
        for i, lv in enumerate(self.levels):
            if got == size:
                break
            bit = 1 << i
            if lv is None:
                hit = any(s & bit for s in states)
                if hit:
                    states = {s for s in states if s & bit}
                    image |= bit
                    got += 1
                if reference is not None and hit != bool(reference & bit):
                    return None
                continue
            orbit_mask, maps = lv
            hit = any(s & orbit_mask for s in states)
            if reference is not None and hit != bool(reference & bit):
                return None
            new = set()
            if hit:
                for s in states:
                    m = s & orbit_mask
                    if not m:
                        continue
                    for y, f in maps:
                        if m >> y & 1:
                            new.add(f(s))
                image |= bit
                got += 1
            else:
                for s in states:
                    for _, f in maps:
                        new.add(f(s))
            states = new
        return image

    def image(self, mask: int) -> int:
        return self._run(mask, None)

    def is_minimal(self, mask: int) -> bool:
        return self._run(mask, mask) is not None


def mask_of(points: Iterable[int]) -> int:
    out = 0
    for p in points:
        out |= 1 << p
    return out


def points_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out

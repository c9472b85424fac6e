"""Finite presentations: parsing and Todd-Coxeter coset enumeration.

Text format::

    name: Q8
    gens: a b
    rels: a^4, b^2=a^2, a^b=a^-1

Generators are declared names; in words they may be juxtaposed (``ab`` is
``a*b``), longest declared name first.  A factor is an atom followed by any
number of exponents ``^k``, ``^-k``, ``^{-k}``, ``^(-k)`` or ``^y`` (the
conjugate ``y^-1 x y``).  Atoms are names, ``1``, parenthesised words and
commutators ``[u, v] = u^-1 v^-1 u v``.  A chain ``u1 = u2 = ... = uk`` gives
the relators ``ui * uk^-1``.  Relations are separated by commas or newlines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ResourceError
from .groups import FiniteGroup, table_from_right_action

Word = tuple[tuple[str, int], ...]

DEFAULT_MAX_COSETS = 65536


def reduce_word(syllables) -> Word:
    """Free reduction: merge equal neighbours, drop zero exponents."""
    out: list[list] = []
    for g, e in syllables:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


def invert_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def power_word(w: Word, k: int) -> Word:
    if k < 0:
        w, k = invert_word(w), -k
    return reduce_word(w * k)


def word_str(w: Word) -> str:
    if not w:
        return "1"
    return "*".join(g if e == 1 else f"{g}^{e}" for g, e in w)


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    name: str = "G"

    def __post_init__(self):
        names = set(self.generators)
        for r in self.relators:
            for g, e in r:
                if g not in names:
                    raise ParseError(f"relator uses undeclared generator {g!r}")
                if e == 0:
                    raise ParseError("zero exponent in relator")

    def evaluate(self, G: FiniteGroup, images: dict[str, int], word: Word) -> int:
        r = 0
        for g, e in word:
            r = G.mul(r, G.power(images[g], e))
        return r

    def satisfied_by(self, G: FiniteGroup, images: dict[str, int]) -> bool:
        return all(self.evaluate(G, images, r) == 0 for r in self.relators)

    def to_text(self) -> str:
        rels = ", ".join(word_str(r) for r in self.relators)
        return f"name: {self.name}\ngens: {' '.join(self.generators)}\nrels: {rels}\n"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^\s*(name|gens|rels)\s*:(.*)$")


class _WordParser:
    def __init__(self, text: str, offset: int, gens: tuple[str, ...]):
        self.s = text
        self.i = 0
        self.offset = offset
        self.gens = sorted(gens, key=len, reverse=True)

    def err(self, msg):
        raise ParseError(msg, self.offset + self.i)

    def skip(self):
        while self.i < len(self.s) and self.s[self.i] in " \t":
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def relation(self) -> list[Word]:
        parts = [self.word()]
        while self.peek() == "=":
            self.i += 1
            parts.append(self.word())
        if self.peek():
            self.err(f"unexpected character {self.peek()!r}")
        if len(parts) == 1:
            return [parts[0]]
        last = invert_word(parts[-1])
        return [reduce_word(p + last) for p in parts[:-1]]

    def word(self) -> Word:
        out: list = []
        start = self.i
        while True:
            c = self.peek()
            if not c or c in "=,)]":
                break
            if c == "*":
                self.i += 1
                continue
            out.extend(self.factor())
        if self.i == start:
            self.err("empty word")
        return reduce_word(out)

    def atom(self) -> Word:
        c = self.peek()
        if c == "(":
            self.i += 1
            w = self.word()
            if self.peek() != ")":
                self.err("unbalanced parenthesis")
            self.i += 1
            return w
        if c == "[":
            self.i += 1
            u = self.word()
            if self.peek() != ",":
                self.err("commutator needs two arguments")
            self.i += 1
            v = self.word()
            if self.peek() != "]":
                self.err("unbalanced bracket")
            self.i += 1
            return reduce_word(invert_word(u) + invert_word(v) + u + v)
        if c == "1":
            self.i += 1
            return ()
        if c == ")":
            self.err("unbalanced parenthesis")
        name = self.name()
        return ((name, 1),)

    def name(self) -> str:
        for g in self.gens:
            if self.s.startswith(g, self.i):
                self.i += len(g)
                return g
        m = re.compile(r"[A-Za-z_][0-9]*").match(self.s, self.i)
        if m:
            self.err(f"unknown generator {m.group(0)!r}")
        self.err(f"unexpected character {self.s[self.i]!r}" if self.i < len(self.s) else "unexpected end of word")

    def exponent_int(self) -> int:
        self.skip()
        m = re.compile(r"-?\s*\d+").match(self.s, self.i)
        if not m:
            self.err("expected an integer exponent")
        self.i = m.end()
        k = int(m.group(0).replace(" ", ""))
        if k == 0:
            self.err("zero exponent")
        return k

    def factor(self) -> list:
        w = self.atom()
        while self.peek() == "^":
            self.i += 1
            c = self.peek()
            if c in "{(":
                close = "}" if c == "{" else ")"
                self.i += 1
                k = self.exponent_int()
                if self.peek() != close:
                    self.err("unbalanced exponent bracket")
                self.i += 1
                w = power_word(w, k)
            elif c == "-" or c.isdigit():
                w = power_word(w, self.exponent_int())
            else:
                y = self.name()
                w = reduce_word(((y, -1),) + w + ((y, 1),))
        return list(w)


def _split_top(text: str) -> list[tuple[str, int]]:
    """Split on commas and newlines outside brackets, keeping offsets."""
    out, depth, start = [], 0, 0
    for i, c in enumerate(text):
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        elif (c == "," and depth == 0) or c == "\n":
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return [(s, o) for s, o in out if s.strip()]


def parse_presentation(text: str) -> Presentation:
    name = "G"
    gens: tuple[str, ...] | None = None
    rels_text: list[tuple[str, int]] = []
    section = None
    pos = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        m = _HEADER.match(body)
        if m:
            section = m.group(1)
            content = m.group(2)
            cpos = pos + m.start(2)
            if section == "name":
                name = content.strip() or name
            elif section == "gens":
                if gens is not None:
                    raise ParseError("duplicate gens line", pos)
                toks = [t for t in re.split(r"[\s,]+", content.strip()) if t]
                for t in toks:
                    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", t):
                        raise ParseError(f"invalid generator name {t!r}", cpos)
                if len(set(toks)) != len(toks):
                    raise ParseError("duplicate generator name", cpos)
                gens = tuple(toks)
            else:
                if gens is None:
                    raise ParseError("rels line before gens line", pos)
                rels_text.append((content, cpos))
        elif body.strip():
            if section != "rels":
                raise ParseError(f"unexpected line {body.strip()!r}", pos)
            rels_text.append((body, pos))
        pos += len(line)
    if gens is None:
        raise ParseError("missing gens line", 0)
    relators: list[Word] = []
    for chunk, cpos in rels_text:
        for piece, off in _split_top(chunk):
            depth = 0
            for c in piece:
                depth += c in "([{"
                depth -= c in ")]}"
            if depth != 0:
                lead = len(piece) - len(piece.lstrip())
                raise ParseError("unbalanced parenthesis", cpos + off + lead)
            for r in _WordParser(piece, cpos + off, gens).relation():
                if r and r not in relators:
                    relators.append(r)
    return Presentation(gens, tuple(relators), name)


def load_presentation(path) -> Presentation:
    return parse_presentation(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# coset enumeration
# ---------------------------------------------------------------------------

class CosetTable:
    """HLT coset enumeration over the trivial subgroup with union-find coincidences."""

    def __init__(self, P: Presentation, max_cosets: int = DEFAULT_MAX_COSETS):
        if max_cosets < 1:
            raise ValueError("max_cosets must be positive")
        self.P = P
        self.ncols = 2 * len(P.generators)
        col = {g: 2 * i for i, g in enumerate(P.generators)}
        self.relators = []
        for r in P.relators:
            cols = []
            for g, e in r:
                c = col[g] if e > 0 else col[g] ^ 1
                cols.extend([c] * abs(e))
            self.relators.append(cols)
        self.max_cosets = max_cosets
        self.table: list[list[int]] = [[-1] * self.ncols]
        self.parent = [0]
        self.queue: list[int] = []

    # union-find over cosets
    def rep(self, c: int) -> int:
        p = self.parent
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def live(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> None:
        d = len(self.table)
        if d >= self.max_cosets:
            raise ResourceError(f"coset enumeration exceeded {self.max_cosets} cosets")
        self.table.append([-1] * self.ncols)
        self.parent.append(d)
        self.table[c][x] = d
        self.table[d][x ^ 1] = c

    def merge(self, a: int, b: int) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        self.parent[hi] = lo
        self.queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        self.queue = []
        self.merge(a, b)
        t = self.table
        k = 0
        while k < len(self.queue):
            e = self.queue[k]
            k += 1
            for x in range(self.ncols):
                f = t[e][x]
                if f < 0:
                    continue
                t[e][x] = -1
                if t[f][x ^ 1] == e:
                    t[f][x ^ 1] = -1
                e1, f1 = self.rep(e), self.rep(f)
                if t[e1][x] >= 0:
                    self.merge(f1, t[e1][x])
                elif t[f1][x ^ 1] >= 0:
                    self.merge(e1, t[f1][x ^ 1])
                else:
                    t[e1][x] = f1
                    t[f1][x ^ 1] = e1

    def scan_and_fill(self, c: int, w: list[int]) -> None:
        t = self.table
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] >= 0:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][w[j] ^ 1] >= 0:
                b = t[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])

    def run(self) -> None:
        c = 0
        while c < len(self.table):
            if self.live(c):
                for w in self.relators:
                    self.scan_and_fill(c, w)
                    if not self.live(c):
                        break
                if self.live(c):
                    for x in range(self.ncols):
                        if self.table[c][x] < 0:
                            self.define(c, x)
            c += 1

    def compact(self) -> np.ndarray:
        """Live cosets renumbered in definition order; one column per generator and inverse."""
        live = [c for c in range(len(self.table)) if self.live(c)]
        new = {c: i for i, c in enumerate(live)}
        out = np.array([[new[self.rep(self.table[c][x])] for x in range(self.ncols)]
                        for c in live], dtype=np.int64).reshape(len(live), self.ncols)
        return out


def coset_enumerate(P: Presentation, max_cosets: int = DEFAULT_MAX_COSETS) -> FiniteGroup:
    """Regular permutation representation of a finite presentation."""
    ct = CosetTable(P, max_cosets)
    ct.run()
    tab = ct.compact()
    n = tab.shape[0]
    if not P.generators:
        return FiniteGroup(np.zeros((1, 1), dtype=np.int32), name=P.name, validate=False)
    rperms = tab[:, 0::2].T.copy()
    table = table_from_right_action(rperms)
    gens = {g: int(rperms[i, 0]) for i, g in enumerate(P.generators)}
    G = FiniteGroup(table, name=P.name, generators=gens, validate=n <= 4096)
    if not P.satisfied_by(G, gens):
        raise ResourceError("enumeration produced a table violating a relator")
    return G


def compile_text(text: str, max_cosets: int = DEFAULT_MAX_COSETS) -> FiniteGroup:
    return coset_enumerate(parse_presentation(text), max_cosets)

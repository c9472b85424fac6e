"""Exhaustive ORR search, the exception catalog and the classification pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterator, Sequence

import numpy as np

from .autengine import stabiliser_is_trivial
from .constructions import (BiWitness, CWitness, ImrichTuple, abelian_2group_orr_set,
                            construct_bi_set, construct_bii_set, construct_c_set,
                            construct_iii_set, imrich_connection_set, prop_reduction_dispatch)
from .digraph import ConnectionSet, cayley
from .errors import ArgumentError, NotFoundError, PreconditionError, ResourceError, SearchTimeout, ValidationError
from .groups import (CaseIIIWitness, CaseIIWitness, F2Span, FiniteGroup, HomSearch, abelian,
                     elementary_abelian_coordinates, invariant_factor_decomposition,
                     is_generalized_dihedral, is_isomorphic, quaternion8)
from .permgroup import MinimalImage, StabChain, mask_of, points_of
from .presentations import coset_enumerate, parse_presentation

AUT_LIMIT = 64
CERTIFY_LIMIT = 64


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """A non-identity automorphism of ``Cay(G, S)`` fixing the identity vertex."""
    members: tuple[int, ...]
    automorphism: tuple[int, ...]
    kind: str                       # "stabiliser" or "coset"

    def validate(self, G: FiniteGroup) -> bool:
        D = cayley(G, self.members)
        p = np.asarray(self.automorphism)
        return bool(p[0] == 0 and not np.array_equal(p, np.arange(G.order))
                    and D.is_automorphism(p))


@dataclass
class Verdict:
    kind: str   # GeneralisedDihedral | Exception | HasORR | NoORRCertified | Unresolved
    name: str | None = None
    conn: ConnectionSet | None = None
    certificates: list[Certificate] = field(default_factory=list)
    reason: str | None = None
    route: str | None = None
    candidates: int = 0
    timed_out: bool = False

    @property
    def label(self) -> str:
        if self.kind == "Exception":
            return f'Exception("{self.name}")'
        if self.kind == "HasORR":
            return "HasORR"
        return self.kind

    @property
    def negative(self) -> bool:
        return self.kind in ("GeneralisedDihedral", "Exception", "NoORRCertified")


def verify_orr(G: FiniteGroup, S: ConnectionSet, timeout: float | None = None):
    """``(ok, report)``: ``S`` is oriented and the identity stabiliser is trivial."""
    if not S.antisymmetric or S.contains_identity:
        return False, None
    rep = stabiliser_is_trivial(cayley(G, S), 0, timeout)
    return rep.trivial, rep


# ---------------------------------------------------------------------------
# automorphisms of small groups
# ---------------------------------------------------------------------------

@dataclass
class GroupAutomorphisms:
    generators: list[np.ndarray]
    order: int
    gens_of_G: list[int]


def group_automorphisms(G: FiniteGroup, deadline: float | None = None) -> GroupAutomorphisms:
    """Generators and order of ``Aut(G)`` by backtracking over generator images.

    Level ``i`` fixes the images of the first ``i`` generators; orbits of
    the next generator under the automorphisms found so far prune repeats,
    so the order is the product of the orbit sizes.
    """
    if G.order > AUT_LIMIT:
        raise ResourceError(f"group automorphisms limited to order {AUT_LIMIT}")
    gens = G.generating_tuple()
    if not gens:
        return GroupAutomorphisms([], 1, [])
    hs = HomSearch(G, G, gens)
    found: list[np.ndarray] = []
    order = 1
    for i in range(len(gens) - 1, -1, -1):
        orbit = _orbit(gens[i], found)
        for y in hs.candidates[i]:
            if y in orbit:
                continue
            phi = next(hs.search(list(gens[:i]) + [y], deadline), None)
            if phi is not None:
                if not _is_automorphism(G, phi):
                    raise ValidationError("backtracking produced a non-automorphism")
                found.append(phi)
                orbit = _orbit(gens[i], found)
        order *= len(orbit)
    return GroupAutomorphisms(found, order, gens)


def _orbit(x: int, perms) -> set[int]:
    orbit = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for y in frontier:
            for p in perms:
                z = int(p[y])
                if z not in orbit:
                    orbit.add(z)
                    nxt.append(z)
        frontier = nxt
    return orbit


def _is_automorphism(G: FiniteGroup, phi) -> bool:
    phi = np.asarray(phi)
    if np.unique(phi).size != G.order:
        return False
    return bool(np.array_equal(phi[G.table], G.table[np.ix_(phi, phi)]))


# ---------------------------------------------------------------------------
# candidate enumeration
# ---------------------------------------------------------------------------

class CandidateSpace:
    """Antisymmetric subsets of ``G``, encoded as bitmasks over its non-involutions."""

    def __init__(self, G: FiniteGroup, up_to_aut: bool, deadline: float | None = None):
        self.G = G
        self.points = [x for x in range(1, G.order) if G.orders[x] > 2]
        self.pos = {x: i for i, x in enumerate(self.points)}
        self.partner = [self.pos[int(G.inv[x])] for x in self.points]
        self.up_to_aut = up_to_aut and bool(self.points)
        self.aut_order = 1
        self.induced_order = 1
        if self.up_to_aut:
            aut = group_automorphisms(G, deadline)
            self.aut_order = aut.order
            perms = [[self.pos[int(phi[x])] for x in self.points] for phi in aut.generators]
            # not faithful in general: s -> s r fixes every rotation of a dihedral group
            chain = StabChain(len(self.points), perms)
            if aut.order % chain.order:
                raise ValidationError("induced action is not a quotient of Aut(G)")
            self.induced_order = chain.order
            self.minimal = MinimalImage(chain)

    @property
    def pairs(self) -> int:
        return len(self.points) // 2

    def members(self, mask: int) -> list[int]:
        return [self.points[p] for p in points_of(mask)]

    def canonical(self, mask: int) -> bool:
        return not self.up_to_aut or self.minimal.is_minimal(mask)

    def by_size(self, deadline: float | None = None) -> Iterator[int]:
        """Canonical antisymmetric masks, by size then lexicographically.

        Orderly generation: removing the largest point of a canonical set
        leaves a canonical set, so each level extends the previous one.
        """
        level = [0]
        n = len(self.points)
        while level:
            for m in level:
                yield m
            nxt = []
            for m in level:
                if deadline is not None and time.monotonic() > deadline:
                    raise SearchTimeout("candidate enumeration timed out", 0)
                top = m.bit_length()
                for p in range(top, n):
                    if m >> self.partner[p] & 1:
                        continue
                    c = m | (1 << p)
                    if self.canonical(c):
                        nxt.append(c)
            nxt.sort(key=lambda c: points_of(c))
            level = nxt


def enumerate_antisymmetric_sets(G: FiniteGroup, up_to_aut: bool = False) -> Iterator[ConnectionSet]:
    space = CandidateSpace(G, up_to_aut)
    for m in space.by_size():
        yield ConnectionSet(G, space.members(m))


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

def coset_certificate(G: FiniteGroup, S: Sequence[int]) -> Certificate:
    """Automorphism of a disconnected ``Cay(G, S)`` moving one component only."""
    H = sorted(G.closure(S))
    if len(H) == G.order:
        raise ArgumentError("S generates G, so Cay(G, S) is connected")
    Hset = set(H)
    perm = np.arange(G.order)
    x = next(e for e in range(G.order) if e not in Hset)
    coset = [G.mul(h, x) for h in H]
    if len(H) > 1:
        z = G.prod([int(G.inv[x]), H[1], x])
        for y in coset:
            perm[y] = G.mul(y, z)
    else:
        y2 = next(e for e in range(1, G.order) if e != x)
        perm[x], perm[y2] = y2, x
    return Certificate(tuple(sorted(S)), tuple(int(v) for v in perm), "coset")


def brute_force_orr(G: FiniteGroup, timeout: float | None = None, up_to_aut: bool = True,
                    certify: bool = True, max_order: int = CERTIFY_LIMIT) -> Verdict:
    """Search canonical antisymmetric sets in (size, lex) order.

    Returns ``HasORR`` at the first set with trivial identity stabiliser or
    ``NoORRCertified`` with one revalidated certificate per candidate.
    """
    deadline = None if timeout is None else time.monotonic() + timeout
    if G.order == 2:
        return Verdict("HasORR", conn=ConnectionSet(G, []), route="order-2")
    if G.order > max_order:
        return opportunistic_orr(G, timeout)
    try:
        space = CandidateSpace(G, up_to_aut, deadline)
        certs: list[Certificate] = []
        count = 0
        for m in space.by_size(deadline):
            count += 1
            members = space.members(m)
            S = ConnectionSet(G, members)
            if G.order > 2 and not S.generates:
                if certify:
                    certs.append(coset_certificate(G, members))
                continue
            rem = None if deadline is None else max(deadline - time.monotonic(), 0.0)
            ok, rep = verify_orr(G, S, rem)
            if ok:
                return Verdict("HasORR", conn=S, route="search", candidates=count)
            if certify:
                certs.append(Certificate(S.members, tuple(rep.witness), "stabiliser"))
        if certify and not all(c.validate(G) for c in certs):
            raise ValidationError("a non-existence certificate failed revalidation")
        return Verdict("NoORRCertified", certificates=certs, candidates=count, route="search")
    except SearchTimeout as e:
        return Verdict("Unresolved", reason=str(e), timed_out=True)


def opportunistic_orr(G: FiniteGroup, timeout: float | None = None, seed: int = 0x0EE,
                      attempts: int = 2000) -> Verdict:
    """Seeded random antisymmetric generating sets; only a positive answer is conclusive."""
    deadline = None if timeout is None else time.monotonic() + timeout
    rng = np.random.default_rng(seed)
    pts = [x for x in range(1, G.order) if G.orders[x] > 2 and x < int(G.inv[x])]
    if not pts:
        return Verdict("Unresolved", reason="no non-involutions")
    for i in range(attempts):
        if deadline is not None and time.monotonic() > deadline:
            return Verdict("Unresolved", reason="opportunistic search timed out", timed_out=True)
        size = int(rng.integers(1, len(pts) + 1))
        pick = rng.choice(len(pts), size=size, replace=False)
        flip = rng.integers(0, 2, size=size)
        members = [pts[p] if f == 0 else int(G.inv[pts[p]]) for p, f in zip(pick.tolist(), flip.tolist())]
        S = ConnectionSet(G, members)
        if not S.generates:
            continue
        try:
            ok, _ = verify_orr(G, S, None if deadline is None else max(deadline - time.monotonic(), 0.0))
        except SearchTimeout:
            return Verdict("Unresolved", reason="opportunistic search timed out", timed_out=True)
        if ok:
            return Verdict("HasORR", conn=S, route="random", candidates=i + 1)
    return Verdict("Unresolved", reason=f"no ORR among {attempts} random sets")


# ---------------------------------------------------------------------------
# exception catalog
# ---------------------------------------------------------------------------

EXCEPTION_NAMES = ("Q8", "C4xC2", "C3^2", "C4xC2^2", "C3xC2^3", "Ex16a", "Ex16b",
                   "C4xC2^3", "Ex32", "D4oD4", "C4xC2^4")

_PRESENTED = {"Ex16a": "ex16a.pres", "Ex16b": "ex16b.pres", "Ex32": "ex32.pres",
              "D4oD4": "d4od4.pres"}


def data_text(kind: str, filename: str) -> str:
    return resources.files("orrforge").joinpath("data").joinpath(kind).joinpath(filename).read_text()


@lru_cache(maxsize=None)
def exception_group(name: str) -> FiniteGroup:
    if name in _PRESENTED:
        P = parse_presentation(data_text("exceptions", _PRESENTED[name]))
        G = coset_enumerate(P)
        G.name = name
        return G
    builders = {
        "Q8": quaternion8,
        "C4xC2": lambda: abelian([4, 2]),
        "C3^2": lambda: abelian([3, 3]),
        "C4xC2^2": lambda: abelian([4, 2, 2]),
        "C3xC2^3": lambda: abelian([3, 2, 2, 2]),
        "C4xC2^3": lambda: abelian([4, 2, 2, 2]),
        "C4xC2^4": lambda: abelian([4, 2, 2, 2, 2]),
    }
    if name not in builders:
        raise NotFoundError(f"unknown exception group {name!r}")
    G = builders[name]()
    G.name = name
    return G


def exception_catalog() -> dict[str, FiniteGroup]:
    return {name: exception_group(name) for name in EXCEPTION_NAMES}


def match_exception(G: FiniteGroup) -> str | None:
    for name in EXCEPTION_NAMES:
        E = exception_group(name)
        if E.order == G.order and is_isomorphic(G, E)[0]:
            return name
    return None


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _abelian_shape(G: FiniteGroup) -> list[int] | None:
    if not G.is_abelian():
        return None
    return [o for _, o in invariant_factor_decomposition(G)]


def _auto_construction(G: FiniteGroup, timeout):
    """Constructions whose hypotheses can be read off ``G`` directly."""
    shape = _abelian_shape(G)
    if shape is None or G.order & (G.order - 1) or G.order < 2:
        return None
    if shape[0] > 4 or (shape[0] == 4 and len(shape) > 1 and shape[1] == 4):
        return "abelian", abelian_2group_orr_set(G)
    if shape[0] == 4 and all(o == 2 for o in shape[1:]) and len(shape) - 1 >= 6:
        x = next(e for e in range(G.order) if G.orders[e] == 4)
        sq = G.mul(x, x)
        inv2 = [e for e in range(G.order) if G.orders[e] == 2]
        _, coord = elementary_abelian_coordinates(G, [0] + inv2)
        span = F2Span()
        span.add(coord[sq])
        es = [sq] + [e for e in inv2 if span.add(coord[e])]
        w = BiWitness(0, len(es), G, x, (), (), tuple(es))
        return "bii", construct_bii_set(w)
    return None


def _witness_construction(witness, timeout):
    if isinstance(witness, ImrichTuple):
        return "imrich", imrich_connection_set(witness)
    if isinstance(witness, BiWitness):
        return ("bi", construct_bi_set(witness)) if witness.split else ("bii", construct_bii_set(witness))
    if isinstance(witness, CWitness):
        return "c", construct_c_set(witness).conn
    if isinstance(witness, CaseIIIWitness):
        return "iii", construct_iii_set(witness, timeout).conn
    if isinstance(witness, CaseIIWitness):
        v = prop_reduction_dispatch(witness, timeout)
        if v.kind == "ORR":
            return "reduction", v.conn
        if v.kind in ("B_i", "B_ii"):
            return _witness_construction(v.bi, timeout)
        if v.kind == "C":
            return _witness_construction(v.c, timeout)
        return None
    raise PreconditionError(f"unsupported witness type {type(witness).__name__}")


def classify(G: FiniteGroup, witness=None, timeout: float | None = None,
             up_to_aut: bool = True) -> Verdict:
    """Generalised dihedral, exception, or a verified ORR (searching if needed)."""
    if G.order == 2:
        return Verdict("HasORR", conn=ConnectionSet(G, []), route="order-2")
    if G.order > 2 and is_generalized_dihedral(G)[0]:
        return Verdict("GeneralisedDihedral")
    name = match_exception(G)
    if name is not None:
        return Verdict("Exception", name=name)
    built = None
    try:
        built = _witness_construction(witness, timeout) if witness is not None else \
            _auto_construction(G, timeout)
    except PreconditionError:
        built = None
    if built is not None:
        route, S = built
        try:
            ok, _ = verify_orr(G, S, timeout)
        except SearchTimeout as e:
            return Verdict("Unresolved", reason=str(e), timed_out=True)
        if ok:
            return Verdict("HasORR", conn=S, route=route)
    return brute_force_orr(G, timeout, up_to_aut=up_to_aut, certify=False)


# ---------------------------------------------------------------------------
# bundled small-group catalog
# ---------------------------------------------------------------------------

def catalog_names() -> list[str]:
    root = resources.files("orrforge").joinpath("data").joinpath("catalog")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".pres"))


@lru_cache(maxsize=None)
def catalog_group(filename: str) -> FiniteGroup:
    P = parse_presentation(data_text("catalog", filename))
    G = coset_enumerate(P)
    G.name = P.name
    return G


def small_group_catalog() -> list[FiniteGroup]:
    return [catalog_group(f) for f in catalog_names()]

"""Reproduction suite: every headline check as a timed, tiered criterion."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .autengine import automorphism_group, stabiliser_generators, stabiliser_is_trivial
from .constructions import (ImrichTuple, abelian_2group_orr_set, abelian_expected_arcs,
                            b_distinct_check, construct_bi_set, construct_bii_set, construct_c_set,
                            construct_iii_set, find_beautiful_tuple, iii_property_checks,
                            imrich_connection_set, induced_arcs, mut_innbrs_vertices)
from .digraph import ConnectionSet, cayley, induced_subdigraph, weakly_connected
from .families import bi_group, c_family_group, discover_caseiii_instance
from .groups import (FiniteGroup, abelian, cyclic, dihedral, elementary_abelian,
                     is_generalized_dihedral, permutation_group)
from .search import (EXCEPTION_NAMES, brute_force_orr, classify, exception_group,
                     small_group_catalog)

SEED = 20240611


@dataclass
class Outcome:
    ok: bool
    detail: str


@dataclass
class Criterion:
    key: str
    tier: int
    budget: float
    run: Callable[[int], Outcome]


def _timed(fn, *args):
    t0 = time.monotonic()
    out = fn(*args)
    return out, time.monotonic() - t0


# ---------------------------------------------------------------------------
# building blocks shared by the suite and the tests
# ---------------------------------------------------------------------------

def abelian_2group_shapes(max_order: int = 128) -> list[list[int]]:
    """Invariant factors of abelian 2-groups meeting the construction's hypotheses."""
    def parts(n, cap):
        if n == 0:
            yield []
            return
        for k in range(min(n, cap), 0, -1):
            for rest in parts(n - k, k):
                yield [k] + rest
    out = []
    for e in range(1, max_order.bit_length()):
        for p in parts(e, e):
            orders = [2 ** k for k in p]
            if orders[0] == 2 or (orders[0] == 4 and (len(orders) == 1 or orders[1] == 2)):
                continue
            out.append(orders)
    return out


def check_abelian_shape(orders) -> dict[str, bool]:
    A = abelian(orders)
    S = abelian_2group_orr_set(A)
    D = cayley(A, S)
    delta = induced_subdigraph(D, S.members)
    return {
        "oriented": S.antisymmetric,
        "trivial_stabiliser": stabiliser_is_trivial(D).trivial,
        "delta_connected": weakly_connected(delta),
        "delta_asymmetric": automorphism_group(delta).order == 1,
        "expected_arcs": induced_arcs(D, S.members) == abelian_expected_arcs(A),
    }


def c_case2_instance(k: int = 6):
    """``n^2 = 1`` and ``n`` swaps ``a_2`` and ``a_3``; the recipe lands in case (2)."""
    A = abelian([4] + [2] * k)
    a = [A.generators[f"a{i + 1}"] for i in range(k + 1)]
    return c_family_group(k, {1: a[2], 2: a[1]}, 0)


def nowitz_watkins_groups() -> list[FiniteGroup]:
    s4 = permutation_group([[1, 2, 3, 0], [1, 0, 2, 3]], "S4")
    extra = [abelian([3, 2, 2, 2]), s4, dihedral(12), cyclic(24), cyclic(18), abelian([6, 3]),
             abelian([4, 2, 2]), elementary_abelian(4)]
    return small_group_catalog() + [G for G in extra if G.order <= 24]


def nowitz_watkins_sample(count: int = 100, seed: int = SEED):
    """``(closed, setwise)`` for seeded random Cayley digraphs of order at most 24."""
    rng = np.random.default_rng(seed)
    groups = [G for G in nowitz_watkins_groups() if G.order > 1]
    results = []
    for _ in range(count):
        G = groups[int(rng.integers(len(groups)))]
        mask = rng.random(G.order) < rng.uniform(0.15, 0.6)
        mask[0] = False
        S = ConnectionSet(G, np.flatnonzero(mask).tolist())
        D = cayley(G, S)
        gens = [np.asarray(g) for g in stabiliser_generators(D, 0).generators]
        fixed = np.ones(G.order, dtype=bool)
        for g in gens:
            fixed &= g == np.arange(G.order)
        F = np.flatnonzero(fixed)
        closed = bool(fixed[G.table[np.ix_(F, F)]].all())
        # setwise: a union of stabiliser orbits generates an invariant subgroup
        orbit_id = _orbits(G.order, gens)
        chosen = rng.random(orbit_id.max() + 1) < 0.3
        chosen[orbit_id[0]] = True
        X = np.flatnonzero(chosen[orbit_id]).tolist()
        H = np.zeros(G.order, dtype=bool)
        H[list(G.closure(X))] = True
        setwise = all(np.array_equal(H[g], H) for g in gens)
        results.append((G.name, len(S), closed, setwise))
    return results


def _orbits(n, gens) -> np.ndarray:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for g in gens:
        for x in range(n):
            a, b = find(x), find(int(g[x]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = [find(x) for x in range(n)]
    _, ids = np.unique(roots, return_inverse=True)
    return ids.ravel()


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

TIER1_EXCEPTIONS = [n for n in EXCEPTION_NAMES if n != "C4xC2^4"]
RAW_COUNTS = {"Q8": 27, "C3^2": 81}


def _exceptions(tier: int) -> Outcome:
    bad = []
    for name in TIER1_EXCEPTIONS:
        G = exception_group(name)
        v, dt = _timed(brute_force_orr, G, 60.0)
        if v.kind != "NoORRCertified" or dt >= 60:
            bad.append(f"{name}:{v.kind}")
        if name in RAW_COUNTS:
            raw = brute_force_orr(G, 60.0, up_to_aut=False)
            if raw.kind != "NoORRCertified" or raw.candidates != RAW_COUNTS[name]:
                bad.append(f"{name}:raw={raw.candidates}")
        if is_generalized_dihedral(G)[0]:
            bad.append(f"{name}:gendih")
    return Outcome(not bad, "all certified" if not bad else ",".join(bad))


def _c4c2_4(tier: int) -> Outcome:
    v = brute_force_orr(exception_group("C4xC2^4"), 1800.0)
    return Outcome(v.kind == "NoORRCertified", f"{v.kind} candidates={v.candidates}")


def _imrich(tier: int) -> Outcome:
    details, ok = [], True
    for k, budget in ((6, 1.0), (7, 10.0)):
        G = elementary_abelian(k)
        S = imrich_connection_set(ImrichTuple(G, tuple(1 << i for i in range(k))))
        rep, dt = _timed(stabiliser_is_trivial, cayley(G, S), 0, budget)
        ok &= rep.trivial and dt < budget
        details.append(f"k={k}:{'trivial' if rep.trivial else 'nontrivial'}")
    return Outcome(ok, " ".join(details))


def _abelian(tier: int) -> Outcome:
    shapes = abelian_2group_shapes(128)
    bad = [o for o in shapes if not all(check_abelian_shape(o).values())]
    return Outcome(not bad, f"{len(shapes)} groups" + (f" failing {bad}" if bad else ""))


def _bi(tier: int) -> Outcome:
    w = bi_group(2, 4)
    S = construct_bi_set(w)
    rep = stabiliser_is_trivial(cayley(w.group, S), 0, 300.0)
    return Outcome(S.antisymmetric and S.generates and rep.trivial, f"|S|={len(S)}")


def _bii(tier: int) -> Outcome:
    ok, parts = True, []
    for ell, kappa in ((0, 7), (3, 1)):
        w = bi_group(ell, kappa, split=False)
        S = construct_bii_set(w)
        rep = stabiliser_is_trivial(cayley(w.group, S), 0, 60.0)
        ok &= S.antisymmetric and S.generates and rep.trivial
        parts.append(f"({ell},{kappa}):|S|={len(S)}")
    return Outcome(ok, " ".join(parts))


def _c(tier: int) -> Outcome:
    cw, _ = c_case2_instance()
    cons = construct_c_set(cw)
    G = cw.group
    mut = mut_innbrs_vertices(G, cons.T, cons.a) == [cons.a]
    S = cons.conn
    sarr = np.array(S.members)
    counts = np.bincount(G.table[np.ix_(sarr, sarr)].ravel(), minlength=G.order)
    k = cw.k
    heavy = set(np.flatnonzero(counts >= 2 ** k - 4 * k - 4).tolist())
    a2 = G.mul(cons.a, cons.a)
    counting = heavy == {G.mul(b, a2) for b in cons.B}
    ok = cons.case == 2 and mut and counting and S.antisymmetric and S.generates
    detail = f"case={cons.case} |S|={len(S)}"
    if tier >= 2:
        bd = b_distinct_check(G, S, cons.B, cons.a, cons.T, cons.extras, 1800.0)
        ok &= bd["ok"] and bd["stabiliser_trivial"]
        detail += " verified"
    return Outcome(ok, detail)


def _iii(tier: int) -> Outcome:
    w = discover_caseiii_instance(2 ** 11)
    cons = construct_iii_set(w)
    checks = iii_property_checks(w, cons)
    ok = all(checks.values())
    detail = f"route={cons.route} |S|={len(cons.conn)}"
    if tier >= 3:
        rep = stabiliser_is_trivial(cayley(w.group, cons.conn), 0, None)
        ok &= rep.trivial
        detail += " verified"
    return Outcome(ok, detail)


# catalog name -> exception name
EXPECTED_EXCEPTIONS = {"Q8": "Q8", "C4xC2": "C4xC2", "C3^2": "C3^2", "C4xC2^2": "C4xC2^2",
                       "C2^2:C4": "Ex16a", "C4oD4": "Ex16b"}


def _catalog(tier: int) -> Outcome:
    groups = small_group_catalog()
    bad = []
    for G in groups:
        v = classify(G)
        if G.name in EXPECTED_EXCEPTIONS:
            good = v.kind == "Exception" and v.name == EXPECTED_EXCEPTIONS[G.name]
        elif G.order > 2 and is_generalized_dihedral(G)[0]:
            good = v.kind == "GeneralisedDihedral"
        else:
            good = v.kind == "HasORR"
        if not good:
            bad.append(G.name)
    ok = not bad and len(groups) == 42
    return Outcome(ok, f"{len(groups)} groups" + (f" mismatched {bad}" if bad else ""))


def _nowitz(tier: int) -> Outcome:
    res = nowitz_watkins_sample(100)
    bad = [r for r in res if not (r[2] and r[3])]
    return Outcome(not bad, f"{len(res)} digraphs")


def _beautiful(tier: int) -> Outcome:
    skip = {"Q8", "C3^2", "C3xC2^3"}
    bad, seen = [], 0
    for G in small_group_catalog():
        v = classify(G)
        if find_beautiful_tuple(G) is None or v.name in skip:
            continue
        seen += 1
        if v.kind != "HasORR":
            bad.append(G.name)
    return Outcome(not bad, f"{seen} groups with beautiful tuples")


CRITERIA = [
    Criterion("exceptions", 1, 600.0, _exceptions),
    Criterion("c4xc2^4", 2, 1800.0, _c4c2_4),
    Criterion("imrich", 1, 11.0, _imrich),
    Criterion("abelian-2-groups", 1, 120.0, _abelian),
    Criterion("bi-2-4", 2, 300.0, _bi),
    Criterion("bii", 1, 120.0, _bii),
    Criterion("c-k6", 1, 1800.0, _c),
    Criterion("iii-2^11", 1, 600.0, _iii),
    Criterion("catalog-42", 1, 300.0, _catalog),
    Criterion("nowitz-watkins", 1, 120.0, _nowitz),
    Criterion("beautiful-tuples", 1, 300.0, _beautiful),
]


@dataclass
class Row:
    key: str
    tier: int
    status: str
    detail: str
    elapsed: float


def run_suite(tier: int = 1, only: list[str] | None = None) -> list[Row]:
    """Run every criterion whose tier is at most ``tier``."""
    rows = []
    for c in CRITERIA:
        if c.tier > tier or (only and c.key not in only):
            continue
        t0 = time.monotonic()
        try:
            out = c.run(tier)
        except Exception as e:  # a crash is a failed criterion, reported with its message
            out = Outcome(False, f"{type(e).__name__}: {e}")
        dt = time.monotonic() - t0
        ok = out.ok and dt <= c.budget
        detail = out.detail if dt <= c.budget else f"{out.detail}; over budget"
        rows.append(Row(c.key, c.tier, "PASS" if ok else "FAIL", detail, dt))
    return rows

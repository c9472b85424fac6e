"""Command-line interface.

Exit codes: 0 success, 1 negative verdict, 2 usage or input error,
3 resource limit or timeout.  Errors go to stderr prefixed ``error:`` or
``timeout:``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .autengine import cycle_notation, stabiliser_is_trivial
from .constructions import (ImrichTuple, abelian_2group_orr_set, construct_bi_set,
                            construct_bii_set, construct_c_set, construct_iii_set,
                            find_nonsplit_generators, imrich_connection_set, l1_extension)
from .digraph import cayley, load_digraph
from .errors import OrrError, ResourceError, SearchTimeout
from .families import bi_group, c_family_group, discover_caseiii_instance
from .fileio import conn_to_text, group_to_text, load_group, parse_conn_text
from .groups import abelian, elementary_abelian, is_generalized_dihedral, subgroup_as_group
from .reproduce import SEED, run_suite
from .search import brute_force_orr, classify

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _timeout(args) -> float | None:
    if getattr(args, "timeout", None) is not None:
        return args.timeout
    env = os.environ.get("ORRFORGE_TIMEOUT")
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"ORRFORGE_TIMEOUT must be a number, got {env!r}") from None
    return None


def _params(text: str | None) -> dict[str, str]:
    out = {}
    for item in (text or "").split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _int(params, key, default=None) -> int:
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise UsageError(f"parameter {key} must be an integer") from None


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report(args, command: str, inputs: dict, verdicts: list, timings: dict) -> None:
    if not getattr(args, "json", False):
        return
    rep = {"command": command, "inputs": inputs, "verdicts": verdicts,
           "seed": SEED, "version": __version__}
    if getattr(args, "timings", False):
        rep["timings"] = timings
    sys.stdout.write(json.dumps(rep, sort_keys=True) + "\n")


def _group_arg(args):
    src = getattr(args, "group", None) or getattr(args, "pres", None)
    if not src:
        raise UsageError("one of --group or --pres is required")
    return load_group(src)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_group(args) -> int:
    if args.action == "build":
        if not args.pres:
            raise UsageError("group build needs --pres")
        from .presentations import coset_enumerate, load_presentation
        P = load_presentation(args.pres)
        G = coset_enumerate(P, args.max_cosets)
        G.name = P.name
        _write(args.output, group_to_text(G))
        return EXIT_OK
    G = _group_arg(args)
    rows = [("name", G.name), ("order", G.order), ("abelian", G.is_abelian()),
            ("exponent", G.exponent()),
            ("generalised_dihedral", is_generalized_dihedral(G)[0] if G.order > 2 else False)]
    if not args.json:
        for k, v in rows:
            print(f"{k}\t{v}")
    _report(args, "group info", {"group": G.name}, [dict(rows)], {})
    return EXIT_OK


def _construct(args):
    fam = args.family
    p = _params(args.params)
    if fam == "abelian":
        G = _group_arg(args)
        return G, abelian_2group_orr_set(G)
    if fam == "imrich":
        k = _int(p, "k", 6)
        G = elementary_abelian(k)
        return G, imrich_connection_set(ImrichTuple(G, tuple(1 << i for i in range(k))))
    if fam in ("bi", "bii"):
        w = bi_group(_int(p, "ell"), _int(p, "kappa"), split=(fam == "bi"))
        return w.group, construct_bi_set(w) if fam == "bi" else construct_bii_set(w)
    if fam == "c":
        k = _int(p, "k", 6)
        A = abelian([4] + [2] * k)
        a = [A.generators[f"a{i + 1}"] for i in range(k + 1)]
        cw, _ = c_family_group(k, {1: a[2], 2: a[1]}, 0)
        return cw.group, construct_c_set(cw).conn
    if fam == "iii":
        w = discover_caseiii_instance(_int(p, "order", 2 ** 11), p.get("base", "elementary"))
        return w.group, construct_iii_set(w).conn
    if fam == "l1":
        G = _group_arg(args)
        if "normal" not in p:
            raise UsageError("l1 needs normal=<index;index;...>")
        N = sorted(G.closure(int(x) for x in p["normal"].split(";") if x))
        sub, old = subgroup_as_group(G, N)
        T = [int(old[t]) for t in abelian_2group_orr_set(sub)]
        return G, l1_extension(G, N, T, find_nonsplit_generators(G, N))
    raise UsageError(f"unknown family {fam!r}")


def cmd_orr(args) -> int:
    G, S = _construct(args)
    if args.save_group:
        Path(args.save_group).write_text(group_to_text(G), encoding="utf-8")
    if args.graph:
        Path(args.graph).write_text(cayley(G, S).to_edges(), encoding="utf-8")
    if not args.json:
        _write(args.output, conn_to_text(S))
    _report(args, "orr construct", {"family": args.family, "params": args.params or ""},
            [{"group": G.name, "order": G.order, "size": len(S), "members": list(S.members)}], {})
    return EXIT_OK


def cmd_verify(args) -> int:
    timeout = _timeout(args)
    if args.graph:
        try:
            text = Path(args.graph).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read {args.graph}: {e.strerror}") from None
        D = load_digraph(text)
    else:
        G = _group_arg(args)
        if not args.conn:
            raise UsageError("verify needs --graph, or --group/--pres with --conn")
        S = parse_conn_text(Path(args.conn).read_text(encoding="utf-8"), G)
        D = cayley(G, S)
        if D.has_digon():
            print("NOT ORIENTED")
            return EXIT_NEGATIVE
    t0 = time.monotonic()
    rep = stabiliser_is_trivial(D, args.base, timeout)
    elapsed = time.monotonic() - t0
    if not args.json:
        print("TRIVIAL" if rep.trivial else cycle_notation(rep.witness))
    _report(args, "verify", {"base": args.base},
            [{"trivial": rep.trivial, "witness": rep.cycles(), "nodes": rep.nodes_explored}],
            {"verify": elapsed})
    return EXIT_OK if rep.trivial else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    timeout = _timeout(args)
    G = _group_arg(args)
    t0 = time.monotonic()
    if args.deep:
        v = classify(G, timeout=timeout)
        if v.kind == "Exception" and G.order <= 64:
            v2 = brute_force_orr(G, timeout)
            if v2.kind == "Unresolved":
                v = v2
            elif v2.kind == "NoORRCertified":
                v.certificates = v2.certificates
            elif v2.kind == "HasORR":
                raise OrrError("catalog exception has an ORR; the search disagrees with the catalog")
    else:
        v = classify(G, timeout=timeout)
    elapsed = time.monotonic() - t0
    witness = "-"
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = G.name.replace("/", "_").replace(" ", "_")
        if v.conn is not None:
            path = out / f"{stem}.conn"
            path.write_text(conn_to_text(v.conn), encoding="utf-8")
            witness = str(path)
        elif v.certificates:
            path = out / f"{stem}.certs"
            path.write_text("".join(f"{list(c.members)}\t{c.kind}\t{cycle_notation(c.automorphism)}\n"
                                    for c in v.certificates), encoding="utf-8")
            witness = str(path)
    elif v.conn is not None:
        witness = " ".join(map(str, v.conn.members)) or "{}"
    if not args.json:
        print(f"{G.name}\t{G.order}\t{v.label}\t{witness}")
    _report(args, "classify", {"group": G.name, "deep": args.deep},
            [{"name": G.name, "order": G.order, "verdict": v.label, "witness": witness,
              "certificates": len(v.certificates)}], {"classify": elapsed})
    if v.kind == "Unresolved":
        prefix = "timeout" if v.timed_out else "error"
        print(f"{prefix}: unresolved: {v.reason}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK if v.kind == "HasORR" else EXIT_NEGATIVE


def cmd_export(args) -> int:
    G = _group_arg(args)
    if not args.conn:
        raise UsageError("export needs --conn")
    S = parse_conn_text(Path(args.conn).read_text(encoding="utf-8"), G)
    D = cayley(G, S)
    _write(args.output, D.to_dot() if args.format == "dot" else D.to_edges())
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.suite != "theorem1":
        raise UsageError(f"unknown suite {args.suite!r}")
    rows = run_suite(args.tier)
    if not args.json:
        head = "criterion\ttier\tstatus\tdetail" + ("\tseconds" if args.timings else "")
        print(head)
        for r in rows:
            line = f"{r.key}\t{r.tier}\t{r.status}\t{r.detail}"
            print(line + (f"\t{r.elapsed:.3f}" if args.timings else ""))
    _report(args, "reproduce", {"suite": args.suite, "tier": args.tier},
            [{"criterion": r.key, "tier": r.tier, "status": r.status, "detail": r.detail}
             for r in rows], {r.key: r.elapsed for r in rows})
    return EXIT_OK if all(r.status == "PASS" for r in rows) else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orrforge", description="Oriented regular representations of finite groups.")
    p.add_argument("--version", action="version", version=f"orrforge {__version__}")
    p.add_argument("--threads", type=int, default=None,
                   help="accepted for compatibility; searches run in one thread")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, group=True):
        if group:
            sp.add_argument("--group", help=".grp multiplication table")
            sp.add_argument("--pres", help=".pres presentation")
        sp.add_argument("--json", action="store_true", help="print a JSON report instead of TSV")
        sp.add_argument("--timings", action="store_true", help="include timings in reports")

    g = sub.add_parser("group", help="build or inspect groups")
    g.add_argument("action", choices=["build", "info"])
    common(g)
    g.add_argument("--max-cosets", type=int, default=65536)
    g.add_argument("-o", "--output")

    o = sub.add_parser("orr", help="construct connection sets")
    o.add_argument("action", choices=["construct"])
    o.add_argument("--family", required=True,
                   choices=["abelian", "imrich", "bi", "bii", "c", "iii", "l1"])
    o.add_argument("--params", help="comma-separated key=value pairs")
    o.add_argument("--graph", help="also write the Cayley digraph as an edge list")
    o.add_argument("--save-group", help="also write the group as a .grp file")
    o.add_argument("-o", "--output")
    common(o)

    v = sub.add_parser("verify", help="check that the base-vertex stabiliser is trivial")
    v.add_argument("--graph", help="edge-list file")
    v.add_argument("--conn", help="connection set file (with --group or --pres)")
    v.add_argument("--base", type=int, default=0)
    v.add_argument("--timeout", type=float)
    common(v)

    c = sub.add_parser("classify", help="classify a group")
    c.add_argument("--deep", action="store_true", help="re-certify catalog exceptions up to order 64")
    c.add_argument("--timeout", type=float)
    c.add_argument("--out-dir", help="write witnesses and certificates here")
    common(c)

    e = sub.add_parser("export", help="export a Cayley digraph")
    e.add_argument("--conn", help="connection set file")
    e.add_argument("--format", choices=["dot", "edges"], default="edges")
    e.add_argument("-o", "--output")
    common(e)

    r = sub.add_parser("reproduce", help="run the reproduction suite")
    r.add_argument("--suite", default="theorem1")
    r.add_argument("--tier", type=int, choices=[1, 2, 3], default=1)
    common(r, group=False)
    return p


COMMANDS = {"group": cmd_group, "orr": cmd_orr, "verify": cmd_verify, "classify": cmd_classify,
            "export": cmd_export, "reproduce": cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SearchTimeout as e:
        print(f"timeout: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ResourceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (OrrError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

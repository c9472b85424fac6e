"""Text formats: ``.grp`` multiplication tables and connection-set listings."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .digraph import ConnectionSet
from .errors import ArgumentError, ParseError, ValidationError
from .groups import FiniteGroup
from .presentations import coset_enumerate, parse_presentation


def group_to_text(G: FiniteGroup) -> str:
    name = G.name.replace(" ", "_") or "G"
    lines = [f"group {name} order {G.order}"]
    lines += [" ".join(map(str, row)) for row in G.table.tolist()]
    return "\n".join(lines) + "\n"


def parse_group_text(text: str) -> FiniteGroup:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty group file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "group" or head[2] != "order":
        raise ParseError("first line must be 'group <name> order <n>'")
    try:
        n = int(head[3])
    except ValueError:
        raise ParseError(f"bad order {head[3]!r}") from None
    if n < 1:
        raise ParseError("order must be positive")
    if len(lines) - 1 != n:
        raise ParseError(f"expected {n} table rows, found {len(lines) - 1}")
    try:
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    except ValueError as e:
        raise ParseError(f"non-integer table entry: {e}") from None
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"table row {i} has {len(row)} entries, expected {n}")
    table = np.array(rows, dtype=np.int64)
    if table.min() < 0 or table.max() >= n:
        raise ValidationError("table entries must lie in 0..n-1")
    return FiniteGroup(table, head[1])


def load_group(path) -> FiniteGroup:
    """Load a ``.grp`` table or compile a ``.pres`` presentation."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ArgumentError(f"cannot read {path}: {e.strerror}") from None
    if p.suffix == ".pres":
        P = parse_presentation(text)
        G = coset_enumerate(P)
        G.name = P.name
        return G
    return parse_group_text(text)


def save_group(G: FiniteGroup, path) -> None:
    Path(path).write_text(group_to_text(G), encoding="utf-8")


def conn_to_text(S: ConnectionSet) -> str:
    """One element per line: index, then the element as a word in the named generators."""
    G = S.group
    lines = [f"# connection set in {G.name}, {len(S)} elements"]
    lines += [f"{s}\t{G.word(s)}" for s in S.members]
    return "\n".join(lines) + "\n"


def parse_conn_text(text: str, G: FiniteGroup) -> ConnectionSet:
    out = []
    for i, ln in enumerate(text.splitlines()):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        tok = ln.split()[0]
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"line {i + 1}: expected an element index, got {tok!r}", i) from None
    if any(x < 0 or x >= G.order for x in out):
        raise ValidationError("connection set element out of range")
    return ConnectionSet(G, out)

"""PEP ``ll_net`` subset and the bad-markings file format.

Only the sections ``PL``, ``TR``, ``TP`` and ``PT`` are understood::

    PEP
    PetriBox
    FORMAT_N2
    PL
    1"p"M1
    2"q"
    TR
    1"t"
    TP
    1>2
    PT
    1<1
"""

from __future__ import annotations

import logging
import re

from .errors import DanglingArc, DuplicateName, PepSyntaxError, UnknownPlaceName
from .net import Marking, PetriNet

log = logging.getLogger(__name__)

HEADER = ("PEP", "PetriBox", "FORMAT_N2")
SECTIONS = ("PL", "TR", "TP", "PT")
_NODE = re.compile(r'^(\d+)"([^"]*)"(.*)$')
_TP = re.compile(r"^(\d+)>(\d+)$")
_PT = re.compile(r"^(\d+)<(\d+)$")


def parse_pep(text: str) -> PetriNet:
    lines = [(i, raw.strip()) for i, raw in enumerate(text.splitlines(), 1)]
    lines = [(i, s) for i, s in lines if s]
    for k, want in enumerate(HEADER):
        if k >= len(lines) or lines[k][1] != want:
            line = lines[k][0] if k < len(lines) else len(text.splitlines()) + 1
            raise PepSyntaxError(line, f"expected header line {want!r}")

    places: dict[int, str] = {}
    initial: set[int] = set()
    trans: dict[int, str] = {}
    pre: dict[int, set[int]] = {}
    post: dict[int, set[int]] = {}
    section = None
    seen_sections: list[str] = []

    for lineno, s in lines[len(HEADER):]:
        if s in SECTIONS:
            if s in seen_sections:
                raise PepSyntaxError(lineno, f"section {s} repeated")
            rank = SECTIONS.index(s)
            if rank >= 2:
                if "TR" not in seen_sections:
                    raise PepSyntaxError(lineno, f"section {s} before TR")
            elif any(SECTIONS.index(x) > rank for x in seen_sections):
                raise PepSyntaxError(lineno, f"section {s} out of order")
            if rank == 1 and "PL" not in seen_sections:
                raise PepSyntaxError(lineno, "section TR before PL")
            section = s
            seen_sections.append(s)
            continue
        if section is None:
            raise PepSyntaxError(lineno, f"unexpected line {s!r} before any section")

        if section in ("PL", "TR"):
            mt = _NODE.match(s)
            if not mt:
                raise PepSyntaxError(lineno, f"malformed {section} line {s!r}")
            ident, name, rest = int(mt.group(1)), mt.group(2), mt.group(3).strip()
            table = places if section == "PL" else trans
            if ident in table:
                raise PepSyntaxError(lineno, f"duplicate id {ident} in {section}")
            if name in table.values():
                raise DuplicateName(f"line {lineno}: duplicate name {name!r}")
            table[ident] = name
            if section == "PL":
                if rest.startswith("M1"):
                    initial.add(ident)
                    rest = rest[2:]
                elif rest.startswith("M0"):
                    rest = rest[2:]
            if rest:
                log.warning("line %d: ignoring attributes %r", lineno, rest)
        else:
            mt = (_TP if section == "TP" else _PT).match(s)
            if not mt:
                raise PepSyntaxError(lineno, f"malformed {section} line {s!r}")
            a, b = int(mt.group(1)), int(mt.group(2))
            tid, pid = (a, b) if section == "TP" else (b, a)
            if tid not in trans:
                raise DanglingArc(f"line {lineno}: unknown transition id {tid}")
            if pid not in places:
                raise DanglingArc(f"line {lineno}: unknown place id {pid}")
            (post if section == "TP" else pre).setdefault(tid, set()).add(pid)

    pids = list(places)
    tids = list(trans)
    pos = {pid: i for i, pid in enumerate(pids)}
    return PetriNet(
        places=tuple(places[p] for p in pids),
        transitions=tuple(trans[t] for t in tids),
        pre=tuple(frozenset(pos[p] for p in pre.get(t, ())) for t in tids),
        post=tuple(frozenset(pos[p] for p in post.get(t, ())) for t in tids),
        initial=frozenset(pos[p] for p in initial),
    )


def emit_pep(net: PetriNet) -> str:
    """Canonical text: places and transitions numbered from 1 in net order."""
    out = list(HEADER) + ["PL"]
    for i, name in enumerate(net.places):
        out.append(f'{i + 1}"{name}"' + ("M1" if i in net.initial else "M0"))
    out.append("TR")
    out.extend(f'{i + 1}"{name}"' for i, name in enumerate(net.transitions))
    out.append("TP")
    for t in range(len(net.transitions)):
        out.extend(f"{t + 1}>{p + 1}" for p in sorted(net.post[t]))
    out.append("PT")
    for t in range(len(net.transitions)):
        out.extend(f"{p + 1}<{t + 1}" for p in sorted(net.pre[t]))
    return "\n".join(out) + "\n"


def parse_bad(text: str, net: PetriNet) -> frozenset:
    """One marking per non-empty line; names split on commas and/or whitespace."""
    found: list[Marking] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        names = [n for n in re.split(r"[,\s]+", body) if n]
        if not names:
            continue
        ids = set()
        for n in names:
            if n not in net.places:
                raise UnknownPlaceName(lineno, n)
            ids.add(net.places.index(n))
        found.append(frozenset(ids))
    return frozenset(found)


def emit_bad(markings, net: PetriNet) -> str:
    rows = sorted(",".join(net.marking_names(m)) for m in markings)
    return "".join(r + "\n" for r in rows)

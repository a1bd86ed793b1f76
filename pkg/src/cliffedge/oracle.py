"""Explicit-state reference implementations.

Everything here works on the reachability graph, or on firing sequences
replayed directly against the net, so it shares no logic with the
unfolding-based analyses it is used to validate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .doom import BadSpec, DoomStatus
from .errors import CapExceeded
from .net import Marking, PetriNet, ReachabilityGraph, enabled
from .unfold import Configuration, Prefix, crest, enumerate_configurations


@dataclass(frozen=True)
class MarkingClassification:
    graph: ReachabilityGraph = field(repr=False)
    status: tuple  # DoomStatus per node
    provenance: str = "oracle"

    def of(self, m: Marking) -> DoomStatus:
        return self.status[self.graph.index[frozenset(m)]]

    def nodes_with(self, s: DoomStatus) -> list[int]:
        return [n for n, x in enumerate(self.status) if x is s]


def oracle_classify(graph: ReachabilityGraph, spec: BadSpec) -> MarkingClassification:
    bad = spec.closed
    cyclic = set()
    for comp in graph.sccs:
        if len(comp) > 1:
            cyclic.update(comp)
    for s, _, d in graph.edges:
        if s == d:
            cyclic.add(s)
    seeds = [n for n in range(len(graph.nodes))
             if n not in bad and (n in cyclic or not graph.succ[n])]
    preds = graph.predecessors()
    free = set(seeds)
    queue = deque(seeds)
    while queue:
        n = queue.popleft()
        for s in preds[n]:
            if s not in free and s not in bad:
                free.add(s)
                queue.append(s)
    status = tuple(
        DoomStatus.BAD if n in bad else DoomStatus.FREE if n in free else DoomStatus.DOOMED
        for n in range(len(graph.nodes))
    )
    return MarkingClassification(graph, status)


def _doomed(cls: MarkingClassification, m: Marking) -> bool:
    return cls.of(m) is not DoomStatus.FREE


def oracle_mindoo(prefix: Prefix, classification: MarkingClassification,
                  cap: int = 200_000) -> set[Configuration]:
    """Doomed configurations of the prefix all of whose crest removals are free."""
    out = set()
    for c in enumerate_configurations(prefix, cap):
        if not _doomed(classification, prefix.mark_of(c.events)):
            continue
        if all(not _doomed(classification, prefix.mark_of(c.events - {e}))
               for e in crest(prefix, c)):
            out.add(c)
    return out


@dataclass(frozen=True)
class LoopWitness:
    """A lasso: a path from the start node to ``cycle[0]`` then a cycle back to it.

    ``path`` and ``cycle`` are tuples of ``(node, transition)`` steps.
    """

    path: tuple
    cycle: tuple

    def word(self) -> tuple:
        return tuple(t for _, t in self.path + self.cycle)


def _bfs_paths(graph, src, avoid=frozenset()):
    """Shortest-path parent pointers from ``src``, never entering ``avoid``."""
    parent = {src: None}
    queue = deque([src])
    while queue:
        n = queue.popleft()
        for t, d in graph.succ[n]:
            if d not in parent and d not in avoid:
                parent[d] = (n, t)
                queue.append(d)
    return parent


def _shortest_cycles(graph, v):
    """All shortest cycles through ``v`` as step tuples starting at ``v``."""
    dist = {v: 0}
    preds: dict[int, list] = {}
    found = []
    frontier = [v]
    while frontier and not found:
        nxt = []
        for n in frontier:
            for t, d in graph.succ[n]:
                if d == v:
                    found.append((n, t))
                elif d not in dist:
                    dist[d] = dist[n] + 1
                    preds[d] = [(n, t)]
                    nxt.append(d)
                elif dist[d] == dist[n] + 1:
                    preds[d].append((n, t))
        frontier = nxt

    def back(n):
        if n == v:
            yield ()
            return
        for p, t in preds[n]:
            for rest in back(p):
                yield rest + ((p, t),)

    out = []
    for n, t in found:
        for steps in back(n):
            out.append(steps + ((n, t),))
    return out


def oracle_loops(graph: ReachabilityGraph, m) -> set[LoopWitness]:
    """Lassos from ``m`` whose markings are all distinct except the closing repeat.

    For every node on a cycle, every shortest cycle through it is paired with
    one shortest path that stays off that cycle.
    """
    start = m if isinstance(m, int) else graph.index[frozenset(m)]
    reach = _bfs_paths(graph, start)
    out = set()
    for v in sorted(reach):
        for cyc in _shortest_cycles(graph, v):
            on_cycle = frozenset(n for n, _ in cyc) - {v}
            parent = _bfs_paths(graph, start, on_cycle) if start not in on_cycle else {}
            if v not in parent:
                continue
            path = []
            n = v
            while parent[n] is not None:
                p, t = parent[n]
                path.append((p, t))
                n = p
            out.add(LoopWitness(tuple(reversed(path)), cyc))
    return out


# -- ridges by direct process enumeration ------------------------------------------

def _processes(net: PetriNet, max_size: int, cap: int, doomed):
    """Configurations of the unfolding reachable through free configurations.

    A condition is ``(producer, place)`` and an event ``(t, preset)``, with
    ``producer`` None for initial conditions, mirroring the canonical
    construction of the unfolding.  Returns ``{events: cut}``.
    """
    init = frozenset((None, p) for p in net.initial)
    seen = {frozenset(): init}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for ev in frontier:
            cut = seen[ev]
            mk = frozenset(p for _, p in cut)
            if doomed(mk) or len(ev) >= max_size:
                continue
            by_place = {p: b for b in cut for p in (b[1],)}
            for t in enabled(net, mk):
                preset = frozenset(by_place[p] for p in net.pre[t])
                e = (t, preset)
                new_ev = ev | {e}
                if new_ev in seen:
                    continue
                seen[new_ev] = (cut - preset) | {(e, p) for p in net.post[t]}
                if len(seen) > cap:
                    raise CapExceeded(f"more than {cap} processes")
                nxt.append(new_ev)
        frontier = nxt
    return seen


def oracle_ridges(net: PetriNet, spec: BadSpec, max_size: Optional[int] = None,
                  cap: int = 200_000) -> set[frozenset]:
    """Folds of crests of minimally doomed configurations of the unfolding.

    Only configurations up to ``max_size`` events are explored (default: the
    number of reachable markings plus one).
    """
    cls = oracle_classify(spec.graph, spec)

    def doomed(mk):
        return cls.of(mk) is not DoomStatus.FREE

    size = len(spec.graph.nodes) + 1 if max_size is None else max_size
    procs = _processes(net, size, cap, doomed)
    ridges = set()
    for ev, cut in procs.items():
        mk = frozenset(p for _, p in cut)
        if not doomed(mk):
            continue
        consumed = {b for _, pre in ev for b in pre}
        top = [e for e in ev if not any((e, p) in consumed for p in net.post[e[0]])]
        ok = True
        for e in top:
            t, pre = e
            below = (cut - {(e, p) for p in net.post[t]}) | pre
            if doomed(frozenset(p for _, p in below)):
                ok = False
                break
        if ok:
            ridges.add(frozenset(t for t, _ in top))
    return ridges

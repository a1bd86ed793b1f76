"""Bad markings, doom classification, shaving and minimal doomed configurations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import NotShaved, UnknownMarking
from .net import Marking, PetriNet, ReachabilityGraph, enabled
from .unfold import (
    MARKING_REPEAT,
    Configuration,
    ConfigLike,
    CutoffPolicy,
    Prefix,
    SubsetOrder,
    _events,
    crest,
    enumerate_configurations,
    is_configuration,
    unfold,
)


class DoomStatus(enum.Enum):
    BAD = "bad"
    DOOMED = "doomed"
    FREE = "free"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BadSpec:
    """User-declared bad markings and their forward closure on a graph."""

    graph: ReachabilityGraph = field(repr=False)
    raw: frozenset
    closed: frozenset  # node ids

    @property
    def closed_markings(self) -> frozenset:
        return frozenset(self.graph.nodes[n] for n in self.closed)


def close_bad(graph: ReachabilityGraph, raw: Iterable[Marking]) -> BadSpec:
    raw = frozenset(frozenset(m) for m in raw)
    stack = [graph.index[m] for m in raw if m in graph.index]
    closed = set(stack)
    while stack:
        n = stack.pop()
        for _, d in graph.succ[n]:
            if d not in closed:
                closed.add(d)
                stack.append(d)
    return BadSpec(graph, raw, frozenset(closed))


def is_bad(spec: BadSpec, m: Marking) -> bool:
    n = spec.graph.index.get(frozenset(m))
    if n is None:
        raise UnknownMarking(f"marking {spec.graph.net.format_marking(m)} is not reachable")
    return n in spec.closed


def _bad_predicate(spec: BadSpec):
    bad = spec.closed_markings
    return lambda m: m in bad


def free_check(
    net: PetriNet, m: Marking, spec: BadSpec, max_events: int = 10_000, cap: int = 200_000
) -> bool:
    """Whether some maximal run from ``m`` avoids bad markings forever.

    Unfolds from ``m`` with inclusion-based loop cutoffs and bad cutoffs: a
    loop cutoff exposes a good cycle, and any good deadlock shows up as the
    marking of some configuration of that prefix.
    """
    m = frozenset(m)
    if is_bad(spec, m):
        return False
    policy = CutoffPolicy(extra_bad_cutoff=True, loop_subset_mode=True, is_bad=_bad_predicate(spec))
    pf = unfold(net, m, SubsetOrder(), policy, max_events=max_events)
    if any(ev.cutoff_reason == MARKING_REPEAT for ev in pf.events):
        return True
    bad = policy.is_bad
    for c in enumerate_configurations(pf, cap):
        mk = pf.mark_of(c.events)
        if not enabled(net, mk) and not bad(mk):
            return True
    return False


def classify_marking(net: PetriNet, m: Marking, spec: BadSpec, **limits) -> DoomStatus:
    if is_bad(spec, m):
        return DoomStatus.BAD
    return DoomStatus.FREE if free_check(net, m, spec, **limits) else DoomStatus.DOOMED


# -- shaving --------------------------------------------------------------------

def is_unchallenged(prefix: Prefix, e: int) -> bool:
    prefix.check_event(e)
    return all(f == e for b in prefix.events[e].preset for f in prefix.consumers[b])


def shave(prefix: Prefix, c: ConfigLike) -> Configuration:
    ev = _events(c)
    while True:
        drop = {e for e in crest(prefix, ev) if is_unchallenged(prefix, e)}
        if not drop:
            return Configuration(ev, prefix)
        ev = ev - drop


def wreath(prefix: Prefix, c: ConfigLike) -> set[Configuration]:
    """Configurations obtained by swapping one crest event for a challenger."""
    ev = _events(c)
    if shave(prefix, ev).events != ev:
        raise NotShaved("wreath needs a shaved configuration")
    out = set()
    for e in crest(prefix, ev):
        rest = ev - {e}
        rivals = {f for b in prefix.events[e].preset for f in prefix.consumers[b]} - {e}
        for f in rivals:
            if f in ev or not (prefix.cones[f] - {f}) <= rest:
                continue
            cand = rest | {f}
            if is_configuration(prefix, cand):
                out.add(Configuration(frozenset(cand), prefix))
    return out


# -- MinDoo ---------------------------------------------------------------------

def min_bad_configs(prefix: Prefix, spec: BadSpec, cap: int = 200_000) -> set[Configuration]:
    bad = _bad_predicate(spec)
    found: list[frozenset] = []
    for c in enumerate_configurations(prefix, cap):
        if any(f <= c.events for f in found):
            continue
        if bad(prefix.mark_of(c.events)):
            found.append(c.events)
    return {Configuration(f, prefix) for f in found}


@dataclass(frozen=True)
class MinDooResult:
    mindoo: frozenset  # of Configuration
    cliff_edges: frozenset  # of event-id frozensets
    ridges: frozenset  # of transition-id frozensets
    stats: dict = field(compare=False, default_factory=dict)

    def sorted_mindoo(self) -> list[Configuration]:
        return sorted(self.mindoo, key=lambda c: (len(c), sorted(c.events)))


class _FreeCache:
    def __init__(self, net: PetriNet, spec: BadSpec, limits: dict):
        self.net, self.spec, self.limits = net, spec, limits
        self.memo: dict[Marking, bool] = {}
        self.queries = 0

    def __call__(self, m: Marking) -> bool:
        self.queries += 1
        if m not in self.memo:
            self.memo[m] = free_check(self.net, m, self.spec, **self.limits)
        return self.memo[m]


def bad_frontier(prefix: Prefix, spec: BadSpec, cap: int = 200_000) -> set[Configuration]:
    """Bad configurations with at least one non-bad crest removal."""
    bad = _bad_predicate(spec)
    out = set()
    for c in enumerate_configurations(prefix, cap):
        if not bad(prefix.mark_of(c.events)):
            continue
        top = crest(prefix, c)
        if not top or any(not bad(prefix.mark_of(c.events - {e})) for e in top):
            out.add(c)
    return out


def min_doo(prefix: Prefix, spec: BadSpec, cap: int = 200_000, seeds: str = "frontier",
            checked_shave: bool = True, **limits) -> MinDooResult:
    """Walk down from bad configurations to the minimally doomed ones.

    ``seeds="minimal"`` starts only from the inclusion-minimal bad
    configurations; the default also starts from every bad configuration one
    crest event above a non-bad one, which is needed when a minimally doomed
    configuration lies only below non-minimal bad ones.  With
    ``checked_shave`` a shaved configuration replaces the original only if
    it is still doomed: on the marking graph an unchallenged event can be
    postponed forever by a concurrent loop, so shaving may free it.
    """
    free = _FreeCache(prefix.net, spec, limits)

    def is_free(ev: frozenset) -> bool:
        return free(prefix.mark_of(ev))

    def shaved(ev: frozenset) -> frozenset:
        s = shave(prefix, ev).events
        if checked_shave and s != ev and is_free(s):
            return ev
        return s

    if seeds == "minimal":
        start = min_bad_configs(prefix, spec, cap)
    elif seeds == "frontier":
        start = bad_frontier(prefix, spec, cap)
    else:
        raise ValueError(f"unknown seeding {seeds!r}")
    worklist = {shaved(c.events) for c in start}
    done: set[frozenset] = set()
    mindoo: set[frozenset] = set()
    picks = 0

    def push(ev):
        s = shaved(ev)
        if s not in done:
            worklist.add(s)

    while worklist:
        c = min(worklist, key=lambda s: (len(s), sorted(s)))
        worklist.discard(c)
        done.add(c)
        picks += 1
        if not c:
            mindoo.add(c)
            continue
        top = crest(prefix, c)
        if not is_free(c - top):
            push(c - top)
            continue
        doomed_below = False
        for e in sorted(top):
            if not is_free(c - {e}):
                push(c - {e})
                doomed_below = True
        if not doomed_below:
            mindoo.add(c)

    if frozenset() in mindoo:
        mindoo = {frozenset()}
    configs = frozenset(Configuration(c, prefix) for c in mindoo)
    edges = frozenset(crest(prefix, c) for c in mindoo)
    ridges = frozenset(frozenset(prefix.events[e].transition for e in ce) for ce in edges)
    stats = {"freeness_checks": len(free.memo), "freeness_queries": free.queries, "worklist_picks": picks}
    return MinDooResult(configs, edges, ridges, stats)


def ridges_witnessed(prefix: Prefix, result: MinDooResult, spec: Optional[BadSpec] = None,
                     expected: Optional[Iterable[frozenset]] = None) -> bool:
    """Every ridge of the net occurs as a fold of some cliff-edge in ``result``.

    ``expected`` defaults to the explicit-state ridge search of the oracle.
    """
    if expected is None:
        if spec is None:
            raise ValueError("need a BadSpec or the expected ridges")
        from .oracle import oracle_ridges

        expected = oracle_ridges(prefix.net, spec)
    return set(map(frozenset, expected)) <= set(result.ridges)

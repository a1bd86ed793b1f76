"""Branching processes of safe nets and complete finite prefixes.

A :class:`Prefix` is built by the usual possible-extensions scheme: candidate
events (co-sets of conditions folding onto a transition preset) wait in a
queue ordered by the configured adequate order on their cones, and each
appended event is checked against the cutoff policy.  Cutoff events keep
their postset conditions but never get successors.

Events and conditions are identified by integer ids in creation order.
Configurations are plain event-id sets internally; the public
:class:`Configuration` wrapper ties a set to its prefix.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union

from .errors import (
    CapExceeded,
    DifferentPrefixes,
    EventLimitExceeded,
    NotAConfiguration,
    UnknownEvent,
    UnknownNode,
    UnsafeFiring,
    UnsafeNet,
)
from .net import Marking, PetriNet, fire

MARKING_REPEAT = "marking-repeat"
BAD_MARKING = "bad-marking"


@dataclass(frozen=True)
class Condition:
    place: int
    producer: Optional[int]  # None for initial conditions
    instance: int


@dataclass(frozen=True)
class Event:
    transition: int
    preset: frozenset
    postset: frozenset
    instance: int
    cutoff: bool = False
    cutoff_reason: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Configuration:
    """A causally closed, conflict-free event set of one prefix."""

    events: frozenset
    prefix: "Prefix" = field(repr=False)

    def __eq__(self, other):
        if isinstance(other, Configuration):
            return self.prefix is other.prefix and self.events == other.events
        return NotImplemented

    def __hash__(self):
        return hash(self.events)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(sorted(self.events))

    def __contains__(self, e):
        return e in self.events

    def names(self) -> list[str]:
        return sorted(self.prefix.event_name(e) for e in self.events)

    def __str__(self):
        return "{" + ",".join(self.names()) + "}"


ConfigLike = Union[Configuration, Iterable[int]]


def _events(c: ConfigLike) -> frozenset:
    return c.events if isinstance(c, Configuration) else frozenset(c)


# -- adequate orders ------------------------------------------------------------

def _plain_key(prefix: "Prefix", events: frozenset, extra=None):
    """(size, sorted transition word, Foata levels) of ``events`` (+ candidate)."""
    items = [(prefix.events[e].transition, prefix.depth[e]) for e in events]
    if extra is not None:
        t, preset = extra
        items.append((t, prefix.candidate_depth(preset)))
    word = tuple(sorted(t for t, _ in items))
    levels: dict[int, list[int]] = {}
    for t, d in items:
        levels.setdefault(d, []).append(t)
    foata = tuple(tuple(sorted(levels[d])) for d in sorted(levels))
    return (len(items), word, foata)


@dataclass(frozen=True)
class SubsetOrder:
    """Strict inclusion.  The queue is linearised by the ERV key."""

    total = False

    def key(self, prefix, events, extra=None):
        return _plain_key(prefix, events, extra)


@dataclass(frozen=True)
class ErvTotalOrder:
    """Size, then lexicographic sorted-word order, then Foata normal form."""

    total = True

    def key(self, prefix, events, extra=None):
        return _plain_key(prefix, events, extra)


@dataclass(frozen=True)
class DheightOrder:
    """Decisional height first, then the ERV key.

    ``height(prefix, events, extra)`` is supplied by the protect module; the
    ERV key keeps size ahead of the word so the order still refines inclusion.
    """

    height: Callable = field(compare=False)
    mode: str = "opponent"
    total = True

    def key(self, prefix, events, extra=None):
        return (self.height(prefix, events, extra),) + _plain_key(prefix, events, extra)


OrderKind = Union[SubsetOrder, ErvTotalOrder, DheightOrder]


@dataclass(frozen=True)
class CutoffPolicy:
    """Cutoff criteria applied on top of marking equivalence.

    ``loop_subset_mode`` (SubsetOrder only) declares ``e`` a cutoff when some
    configuration strictly inside ``cone(e)`` has the same marking.
    ``extra_bad_cutoff`` additionally cuts every event whose cone marking
    satisfies ``is_bad``.
    """

    extra_bad_cutoff: bool = False
    loop_subset_mode: bool = False
    is_bad: Optional[Callable[[Marking], bool]] = field(default=None, compare=False)

    def check(self, order):
        if self.loop_subset_mode and not isinstance(order, SubsetOrder):
            raise ValueError("loop_subset_mode requires SubsetOrder")
        if self.extra_bad_cutoff and self.is_bad is None:
            raise ValueError("extra_bad_cutoff needs an is_bad predicate")


# -- the prefix -----------------------------------------------------------------

class Prefix:
    """Occurrence net + fold + cutoff flags.  Immutable once :func:`unfold` returns."""

    def __init__(self, net: PetriNet, start: Marking, order: OrderKind, policy: CutoffPolicy):
        self.net = net
        self.start = frozenset(start)
        self.order = order
        self.policy = policy
        self.conditions: list[Condition] = []
        self.events: list[Event] = []
        self.cones: list[frozenset] = []
        self.depth: list[int] = []
        self.consumers: list[list[int]] = []
        self.by_key: dict[tuple[int, frozenset], int] = {}
        self._place_count: dict[int, int] = {}
        self._trans_count: dict[int, int] = {}
        for p in sorted(self.start):
            self._add_condition(p, None)
        self.initial_cut = frozenset(range(len(self.conditions)))

    # construction helpers
    def _add_condition(self, place: int, producer: Optional[int]) -> int:
        k = self._place_count.get(place, 0) + 1
        self._place_count[place] = k
        self.conditions.append(Condition(place, producer, k))
        self.consumers.append([])
        return len(self.conditions) - 1

    def candidate_depth(self, preset: Iterable[int]) -> int:
        producers = [self.conditions[b].producer for b in preset]
        return 1 + max((self.depth[f] for f in producers if f is not None), default=0)

    def candidate_stump(self, preset: Iterable[int]) -> frozenset:
        out: set[int] = set()
        for b in preset:
            f = self.conditions[b].producer
            if f is not None:
                out |= self.cones[f]
        return frozenset(out)

    # queries
    def __len__(self):
        return len(self.events)

    def event_name(self, e: int) -> str:
        ev = self.events[e]
        return f"{self.net.transitions[ev.transition]}#{ev.instance}"

    def condition_name(self, b: int) -> str:
        c = self.conditions[b]
        return f"{self.net.places[c.place]}^{c.instance}"

    def event_by_name(self, name: str) -> int:
        for e in range(len(self.events)):
            if self.event_name(e) == name:
                return e
        raise UnknownEvent(f"no event named {name!r}")

    def events_of(self, transition: Union[int, str]) -> list[int]:
        t = self.net.transition_id(transition) if isinstance(transition, str) else transition
        return [e for e, ev in enumerate(self.events) if ev.transition == t]

    def cutoffs(self) -> list[int]:
        return [e for e, ev in enumerate(self.events) if ev.cutoff]

    def non_cutoff_count(self) -> int:
        return sum(1 for ev in self.events if not ev.cutoff)

    def configuration(self, events: ConfigLike) -> Configuration:
        ev = _events(events)
        if not is_configuration(self, ev):
            raise NotAConfiguration(f"{sorted(ev)} is not a configuration")
        return Configuration(ev, self)

    def configuration_by_names(self, names: Iterable[str]) -> Configuration:
        return self.configuration(self.event_by_name(n) for n in names)

    def cut_of(self, events: frozenset) -> frozenset:
        pre: set[int] = set()
        post: set[int] = set(self.initial_cut)
        for e in events:
            ev = self.events[e]
            pre |= ev.preset
            post |= ev.postset
        return frozenset(post - pre)

    def mark_of(self, events: frozenset) -> Marking:
        return frozenset(self.conditions[b].place for b in self.cut_of(events))

    def check_event(self, e: int) -> None:
        if not isinstance(e, int) or not 0 <= e < len(self.events):
            raise UnknownEvent(f"unknown event {e!r}")


# -- construction ---------------------------------------------------------------

def unfold(
    net: PetriNet,
    start: Optional[Marking] = None,
    order: Optional[OrderKind] = None,
    policy: Optional[CutoffPolicy] = None,
    max_events: int = 10_000,
) -> Prefix:
    """Build a complete finite prefix from ``start`` (default: the initial marking)."""
    if max_events <= 0:
        raise ValueError("max_events must be positive")
    start = net.initial if start is None else net.check_marking(start)
    order = ErvTotalOrder() if order is None else order
    policy = CutoffPolicy() if policy is None else policy
    policy.check(order)

    pf = Prefix(net, start, order, policy)
    co: dict[int, set[int]] = {b: set(pf.initial_cut) - {b} for b in pf.initial_cut}
    queue: list = []
    queued: set[tuple[int, frozenset]] = set()
    counter = itertools.count()

    # total-order cutoffs: marking -> key of the smallest configuration seen
    seen_key: dict[Marking, tuple] = {start: order.key(pf, frozenset())}
    # SubsetOrder without loop mode: marking -> cones (plus the empty set)
    seen_cones: dict[Marking, list[frozenset]] = {start: [frozenset()]}
    sub_marks: dict[frozenset, frozenset] = {}

    def push(t: int, preset: frozenset):
        if (t, preset) in queued:
            return
        queued.add((t, preset))
        stump = pf.candidate_stump(preset)
        heapq.heappush(queue, (order.key(pf, stump, (t, preset)), next(counter), t, preset, stump))

    def extensions_with(b: int):
        p = pf.conditions[b].place
        for t in range(len(net.transitions)):
            if p not in net.pre[t]:
                continue
            others = sorted(net.pre[t] - {p})
            pools = [[c for c in co[b] if pf.conditions[c].place == q] for q in others]
            for choice in itertools.product(*pools):
                if all(y in co[x] for x, y in itertools.combinations(choice, 2)):
                    push(t, frozenset(choice) | {b})

    def marks_within(down: frozenset) -> frozenset:
        """Markings of every configuration contained in the down-closed set."""
        hit = sub_marks.get(down)
        if hit is not None:
            return hit
        out = {pf.mark_of(down)}
        consumed = {b for e in down for b in pf.events[e].preset}
        for e in down:
            if not (pf.events[e].postset & consumed):
                out |= marks_within(down - {e})
        res = sub_marks[down] = frozenset(out)
        return res

    for t in range(len(net.transitions)):
        if net.pre[t] <= start:
            push(t, frozenset(b for b in pf.initial_cut if pf.conditions[b].place in net.pre[t]))

    while queue:
        if len(pf.events) >= max_events:
            raise EventLimitExceeded(max_events, len(pf.events), len(queue))
        key, _, t, preset, stump = heapq.heappop(queue)
        e = len(pf.events)
        k = pf._trans_count.get(t, 0) + 1
        pf._trans_count[t] = k
        cone = stump | {e}
        # the cone marking must be a legal (safe) firing from the stump marking
        try:
            mark = fire(net, pf.mark_of(stump), t)
        except UnsafeFiring as exc:
            raise UnsafeNet(str(exc)) from None

        reason = None
        if policy.extra_bad_cutoff and policy.is_bad(mark):
            reason = BAD_MARKING
        elif policy.loop_subset_mode:
            if mark in marks_within(stump):
                reason = MARKING_REPEAT
        elif order.total:
            prev = seen_key.get(mark)
            if prev is not None and prev < key:
                reason = MARKING_REPEAT
        else:
            if any(c < cone for c in seen_cones.get(mark, ())):
                reason = MARKING_REPEAT

        postset = frozenset(pf._add_condition(p, e) for p in sorted(net.post[t]))
        pf.events.append(Event(t, preset, postset, k, reason is not None, reason))
        pf.cones.append(frozenset(cone))
        pf.depth.append(pf.candidate_depth(preset))
        pf.by_key[(t, preset)] = e
        for b in preset:
            pf.consumers[b].append(e)
        if reason is not None:
            continue
        if mark not in seen_key or key < seen_key[mark]:
            seen_key[mark] = key
        seen_cones.setdefault(mark, []).append(frozenset(cone))

        base = set.intersection(*(co[b] for b in preset)) if preset else set()
        for b in postset:
            co[b] = (base | postset) - {b}
            for x in co[b]:
                if x not in postset:
                    co[x].add(b)
        for b in sorted(postset):
            extensions_with(b)

    return pf


# -- configuration algebra ------------------------------------------------------

def cone(prefix: Prefix, e: int) -> Configuration:
    prefix.check_event(e)
    return Configuration(prefix.cones[e], prefix)


def stump(prefix: Prefix, e: int) -> Configuration:
    prefix.check_event(e)
    return Configuration(prefix.cones[e] - {e}, prefix)


def crest(prefix: Prefix, c: ConfigLike) -> frozenset:
    """Maximal events of ``c``."""
    ev = _events(c)
    consumed = {b for e in ev for b in prefix.events[e].preset}
    return frozenset(e for e in ev if not (prefix.events[e].postset & consumed))


def cut(prefix: Prefix, c: ConfigLike) -> frozenset:
    return prefix.cut_of(_events(c))


def mark(prefix: Prefix, c: ConfigLike) -> Marking:
    return prefix.mark_of(_events(c))


def is_configuration(prefix: Prefix, events: ConfigLike) -> bool:
    ev = _events(events)
    for e in ev:
        prefix.check_event(e)
        if not prefix.cones[e] <= ev:
            return False
    used: set[int] = set()
    for e in ev:
        pre = prefix.events[e].preset
        if used & pre:
            return False
        used |= pre
    return True


def enabled_events(prefix: Prefix, c: ConfigLike) -> frozenset:
    ev = _events(c)
    if not is_configuration(prefix, ev):
        raise NotAConfiguration(f"{sorted(ev)} is not a configuration")
    cut_ = prefix.cut_of(ev)
    cands = {f for b in cut_ for f in prefix.consumers[b]}
    return frozenset(f for f in cands if prefix.events[f].preset <= cut_)


# -- structural relations ---------------------------------------------------------

Node = Union[int, tuple]  # event id, ("e", id) or ("b", condition id)


def _node(prefix: Prefix, x: Node) -> tuple[str, int]:
    if isinstance(x, tuple) and len(x) == 2 and x[0] in ("e", "b"):
        kind, i = x
    elif isinstance(x, int):
        kind, i = "e", x
    else:
        raise UnknownNode(f"unknown node {x!r}")
    size = len(prefix.events) if kind == "e" else len(prefix.conditions)
    if not isinstance(i, int) or not 0 <= i < size:
        raise UnknownNode(f"unknown node {x!r}")
    return kind, i


def _below(prefix: Prefix, node: tuple[str, int]) -> frozenset:
    """Events <= node (an event's cone, a condition's producer cone)."""
    kind, i = node
    if kind == "e":
        return prefix.cones[i]
    f = prefix.conditions[i].producer
    return frozenset() if f is None else prefix.cones[f]


def causal(prefix: Prefix, x: Node, y: Node) -> bool:
    """``x < y``: a non-empty directed path leads from x to y."""
    x, y = _node(prefix, x), _node(prefix, y)
    below_y = _below(prefix, y)
    if x[0] == "e":
        return x[1] in below_y and x != y
    return any(f in below_y for f in prefix.consumers[x[1]])


def direct_conflict(prefix: Prefix, e: int, f: int) -> bool:
    prefix.check_event(e)
    prefix.check_event(f)
    return e != f and bool(prefix.events[e].preset & prefix.events[f].preset)


def in_conflict(prefix: Prefix, x: Node, y: Node) -> bool:
    bx, by = _below(prefix, _node(prefix, x)), _below(prefix, _node(prefix, y))
    if len(bx) > len(by):
        bx, by = by, bx
    pre_y = {}
    for v in by:
        for b in prefix.events[v].preset:
            pre_y.setdefault(b, set()).add(v)
    for u in bx:
        for b in prefix.events[u].preset:
            if pre_y.get(b, set()) - {u}:
                return True
    return False


def concurrent(prefix: Prefix, x: Node, y: Node) -> bool:
    if _node(prefix, x) == _node(prefix, y):
        return False
    return not (causal(prefix, x, y) or causal(prefix, y, x) or in_conflict(prefix, x, y))


# -- orders on configurations ---------------------------------------------------

def compare(order: OrderKind, c1: ConfigLike, c2: ConfigLike, prefix: Optional[Prefix] = None) -> str:
    """'less' | 'greater' | 'equal' | 'incomparable'."""
    if isinstance(c1, Configuration) and isinstance(c2, Configuration):
        if c1.prefix is not c2.prefix:
            raise DifferentPrefixes("configurations belong to different prefixes")
        prefix = c1.prefix
    else:
        prefix = prefix or next(
            (c.prefix for c in (c1, c2) if isinstance(c, Configuration)), None
        )
        if prefix is None:
            raise ValueError("a prefix is needed to compare raw event sets")
    a, b = _events(c1), _events(c2)
    if a == b:
        return "equal"
    if isinstance(order, SubsetOrder):
        if a < b:
            return "less"
        if b < a:
            return "greater"
        return "incomparable"
    ka, kb = order.key(prefix, a), order.key(prefix, b)
    return "less" if ka < kb else "greater"


# -- enumeration ------------------------------------------------------------------

def enumerate_configurations(prefix: Prefix, cap: int = 100_000) -> Iterator[Configuration]:
    """Every configuration exactly once, by increasing size; raises CapExceeded past ``cap``."""
    count = 0
    level = {frozenset(): prefix.initial_cut}
    while level:
        nxt: dict[frozenset, frozenset] = {}
        for ev in sorted(level, key=sorted):
            count += 1
            if count > cap:
                raise CapExceeded(f"more than {cap} configurations")
            yield Configuration(ev, prefix)
            cut_ = level[ev]
            for b in cut_:
                for f in prefix.consumers[b]:
                    ef = prefix.events[f]
                    if ef.preset <= cut_:
                        new = ev | {f}
                        if new not in nxt:
                            nxt[new] = (cut_ - ef.preset) | ef.postset
        level = nxt


def replay(prefix: Prefix, word: Iterable[int], start: Optional[frozenset] = None) -> Optional[list[int]]:
    """Map a firing sequence onto prefix events from ``start`` (default: empty).

    Returns the events fired, or None if the sequence leaves the prefix.
    """
    ev = frozenset() if start is None else frozenset(start)
    cut_ = prefix.cut_of(ev)
    fired = []
    for t in word:
        nxt = None
        for b in cut_:
            for f in prefix.consumers[b]:
                ef = prefix.events[f]
                if ef.transition == t and ef.preset <= cut_:
                    nxt = f
                    break
            if nxt is not None:
                break
        if nxt is None:
            return None
        fired.append(nxt)
        cut_ = (cut_ - prefix.events[nxt].preset) | prefix.events[nxt].postset
    return fired

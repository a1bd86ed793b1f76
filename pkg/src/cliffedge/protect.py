"""Decisional height, strict opponents and protectedness."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .doom import BadSpec, DoomStatus, MinDooResult, classify_marking
from .errors import InvalidPair
from .unfold import Configuration, ConfigLike, DheightOrder, Prefix, _events, is_configuration

_NEW = -1  # id of a candidate event that is not in the prefix yet


class HeightMode(enum.Enum):
    OPPONENT = "opponent"
    LITERAL = "literal"


@dataclass(frozen=True)
class Finite:
    n: int

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True)
class Safe:
    def __str__(self):
        return "safe"


SAFE = Safe()
Protectedness = Union[Finite, Safe]


def _mode(mode) -> HeightMode:
    return mode if isinstance(mode, HeightMode) else HeightMode(mode)


def _opponents(prefix: Prefix, context: frozenset, against: frozenset, extra=None) -> set[tuple]:
    """Possible events enabled by ``context`` and in direct conflict with ``against``.

    Events are identified as ``(transition, preset)``.  ``extra`` is a
    candidate ``(t, preset)`` treated as a member of the context (and of
    ``against`` when ``_NEW`` is in it); its postset gets virtual conditions.
    """
    net = prefix.net
    cones = {e: prefix.cones[e] for e in context}
    presets = {e: prefix.events[e].preset for e in context}
    posts = {e: [(b, prefix.conditions[b].place) for b in prefix.events[e].postset] for e in context}
    own = {(prefix.events[e].transition, presets[e]) for e in context}
    if extra is not None:
        t0, s0 = extra
        stump = frozenset().union(*(cones[prefix.conditions[b].producer]
                                    for b in s0 if prefix.conditions[b].producer is not None))
        cones[_NEW] = stump | {_NEW}
        presets[_NEW] = frozenset(s0)
        posts[_NEW] = [(("new", p), p) for p in sorted(net.post[t0])]
        own.add((t0, frozenset(s0)))

    consumer = {b: e for e, pre in presets.items() for b in pre}
    producer = {b: e for e, post in posts.items() for b, _ in post}
    places = {b: prefix.conditions[b].place for b in prefix.initial_cut}
    for post in posts.values():
        places.update(post)
    # consumed conditions stay eligible: opponents compete for them
    by_place: dict[int, list] = {}
    for b, p in places.items():
        by_place.setdefault(p, []).append(b)

    def below(b) -> frozenset:
        f = producer.get(b)
        return cones[f] if f is not None else frozenset()

    def co(b1, b2) -> bool:
        c1, c2 = consumer.get(b1), consumer.get(b2)
        return not ((c1 is not None and c1 in below(b2)) or (c2 is not None and c2 in below(b1)))

    hot = set()
    for e in against:
        hot |= presets[e]
    out = set()
    for t in range(len(net.transitions)):
        pools = [by_place.get(p, []) for p in sorted(net.pre[t])]
        for choice in itertools.product(*pools):
            if not hot.intersection(choice):
                continue
            if all(co(x, y) for x, y in itertools.combinations(choice, 2)):
                key = (t, frozenset(choice))
                if key not in own:
                    out.add(key)
    return out


def strict_opponents(prefix: Prefix, c: ConfigLike, context: Optional[ConfigLike] = None) -> set[int]:
    """Prefix events enabled by ``context`` that lose a direct conflict to ``c``."""
    c_ev = _events(c)
    ctx = c_ev if context is None else _events(context)
    if not c_ev <= ctx:
        raise InvalidPair("c must be contained in its context")
    found = _opponents(prefix, ctx, c_ev)
    return {prefix.by_key[k] for k in found if k in prefix.by_key}


def plain_opponents(prefix: Prefix, c: ConfigLike) -> set[int]:
    """Prefix events outside ``c`` in direct conflict with some event of ``c``."""
    ev = _events(c)
    return {f for e in ev for b in prefix.events[e].preset for f in prefix.consumers[b]} - ev


def dheight(prefix: Prefix, c: ConfigLike, mode=HeightMode.OPPONENT) -> int:
    return _height(prefix, _events(c), None, _mode(mode))


def _height(prefix: Prefix, events: frozenset, extra, mode: HeightMode) -> int:
    against = events | ({_NEW} if extra is not None else set())
    opp = _opponents(prefix, events, against, extra)
    if mode is HeightMode.OPPONENT:
        return len(opp)
    hot = {b for _, s in opp for b in s}
    pre = {e: prefix.events[e].preset for e in events}
    if extra is not None:
        pre[_NEW] = frozenset(extra[1])
    return sum(1 for e in against if pre[e] & hot)


def height_function(mode=HeightMode.OPPONENT):
    m = _mode(mode)
    return lambda prefix, events, extra=None: _height(prefix, frozenset(events), extra, m)


def dheight_order(mode=HeightMode.OPPONENT) -> DheightOrder:
    m = _mode(mode)
    return DheightOrder(height=height_function(m), mode=m.value)


def dheight_order_key(prefix: Prefix, c: ConfigLike, mode=HeightMode.OPPONENT) -> tuple:
    return dheight_order(mode).key(prefix, _events(c))


# -- protectedness ----------------------------------------------------------------

def _status(prefix: Prefix, ev: frozenset, spec: BadSpec) -> DoomStatus:
    return classify_marking(prefix.net, prefix.mark_of(ev), spec)


def mindoo_extensions(prefix: Prefix, c: ConfigLike, result: MinDooResult, spec: BadSpec,
                      status: Optional[DoomStatus] = None) -> set[Configuration]:
    ev = _events(c)
    status = status or _status(prefix, ev, spec)
    if status is not DoomStatus.FREE:
        return {Configuration(ev, prefix)}
    return {m for m in result.mindoo if ev <= m.events}


def suffix_height(prefix: Prefix, c: ConfigLike, target: ConfigLike) -> int:
    """Decisions taken after ``c`` on the way to ``target``, judged in ``target``."""
    ev, tgt = _events(c), _events(target)
    return len(_opponents(prefix, tgt, tgt - ev))


def protectedness(prefix: Prefix, c: ConfigLike, result: MinDooResult, spec: BadSpec,
                  mode=HeightMode.OPPONENT, status: Optional[DoomStatus] = None) -> Protectedness:
    ev = _events(c)
    if not is_configuration(prefix, ev):
        raise InvalidPair(f"{sorted(ev)} is not a configuration")
    status = status or _status(prefix, ev, spec)
    if status is not DoomStatus.FREE:
        return Finite(0)
    exts = mindoo_extensions(prefix, ev, result, spec, status)
    if not exts:
        return SAFE
    m = _mode(mode)
    if m is HeightMode.OPPONENT:
        return Finite(min(suffix_height(prefix, ev, x) for x in exts))
    # literal: suffix events of the target that lose some conflict inside it
    best = None
    for x in exts:
        tgt = x.events
        hot = {b for _, s in _opponents(prefix, tgt, tgt - ev) for b in s}
        h = sum(1 for e in tgt - ev if prefix.events[e].preset & hot)
        best = h if best is None else min(best, h)
    return Finite(best)

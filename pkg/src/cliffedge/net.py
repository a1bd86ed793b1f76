"""Safe Petri nets: firing, reachability graph, attractors, basins, fairness.

Places and transitions are identified by their position in the declaration
order of the net (``0 .. n-1``); names are kept for display and parsing.  A
marking is a ``frozenset`` of place ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    MalformedMarking,
    MalformedNet,
    NotDecidable,
    NotEnabled,
    ScriptNotFireable,
    SourceTransition,
    StateLimitExceeded,
    UnsafeFiring,
    UnsafeNet,
)

Marking = frozenset  # frozenset[int] of marked place ids


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[str, ...]
    pre: tuple[frozenset, ...]
    post: tuple[frozenset, ...]
    initial: Marking

    def __post_init__(self):
        n_p, n_t = len(self.places), len(self.transitions)
        if len(set(self.places)) != n_p:
            raise MalformedNet("place names must be unique")
        if len(set(self.transitions)) != n_t:
            raise MalformedNet("transition names must be unique")
        if len(self.pre) != n_t or len(self.post) != n_t:
            raise MalformedNet("pre/post must have one entry per transition")
        for t in range(n_t):
            arcs = self.pre[t] | self.post[t]
            if any(not 0 <= p < n_p for p in arcs):
                raise MalformedNet(f"transition {self.transitions[t]!r} refers to an undeclared place")
            if not self.pre[t]:
                raise SourceTransition(f"transition {self.transitions[t]!r} has an empty preset")
        if any(not 0 <= p < n_p for p in self.initial):
            raise MalformedNet("initial marking refers to an undeclared place")

    @classmethod
    def build(
        cls,
        places: Sequence[str],
        transitions: Mapping[str, tuple[Iterable[str], Iterable[str]]],
        initial: Iterable[str],
    ) -> "PetriNet":
        """Build a net from names: ``transitions`` maps name -> (pre, post)."""
        pidx = {name: i for i, name in enumerate(places)}

        def ids(names):
            try:
                return frozenset(pidx[n] for n in names)
            except KeyError as exc:
                raise MalformedNet(f"unknown place {exc.args[0]!r}") from None

        names = list(transitions)
        return cls(
            places=tuple(places),
            transitions=tuple(names),
            pre=tuple(ids(transitions[t][0]) for t in names),
            post=tuple(ids(transitions[t][1]) for t in names),
            initial=ids(initial),
        )

    def place_id(self, name: str) -> int:
        try:
            return self.places.index(name)
        except ValueError:
            raise MalformedMarking(f"unknown place {name!r}") from None

    def transition_id(self, name: str) -> int:
        try:
            return self.transitions.index(name)
        except ValueError:
            raise MalformedNet(f"unknown transition {name!r}") from None

    def marking(self, names: Iterable[str]) -> Marking:
        return frozenset(self.place_id(n) for n in names)

    def check_marking(self, m: Iterable[int]) -> Marking:
        m = frozenset(m)
        if any(not isinstance(p, int) or not 0 <= p < len(self.places) for p in m):
            raise MalformedMarking(f"marking {sorted(m)!r} is not a set of place ids")
        return m

    def marking_names(self, m: Marking) -> tuple[str, ...]:
        return tuple(self.places[p] for p in sorted(m))

    def format_marking(self, m: Marking) -> str:
        return "{" + ",".join(self.marking_names(m)) + "}"


def enabled(net: PetriNet, m: Marking) -> frozenset:
    """Transitions whose preset is contained in ``m``."""
    return frozenset(t for t, pre in enumerate(net.pre) if pre <= m)


def fire(net: PetriNet, m: Marking, t: int) -> Marking:
    pre, post = net.pre[t], net.post[t]
    if not pre <= m:
        raise NotEnabled(f"{net.transitions[t]} is not enabled at {net.format_marking(m)}")
    if (post - pre) & m:
        raise UnsafeFiring(
            f"firing {net.transitions[t]} at {net.format_marking(m)} puts a second token on "
            + ",".join(net.places[p] for p in sorted((post - pre) & m))
        )
    return (m - pre) | post


# -- reachability graph -------------------------------------------------------

@dataclass(frozen=True)
class ReachabilityGraph:
    net: PetriNet
    nodes: tuple[Marking, ...]
    index: Mapping[Marking, int] = field(repr=False)
    root: int
    edges: tuple[tuple[int, int, int], ...] = field(repr=False)
    succ: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)
    sccs: tuple[frozenset, ...] = field(repr=False)
    scc_of: tuple[int, ...] = field(repr=False)
    terminal_scc_ids: frozenset = field(repr=False)

    def __len__(self):
        return len(self.nodes)

    def node(self, m: Marking) -> int:
        return self.index[frozenset(m)]

    def successors(self, n: int) -> set[int]:
        return {d for _, d in self.succ[n]}

    def predecessors(self) -> list[set[int]]:
        preds: list[set[int]] = [set() for _ in self.nodes]
        for s, _, d in self.edges:
            preds[d].add(s)
        return preds


def _tarjan(n_nodes: int, succ) -> list[list[int]]:
    """Iterative Tarjan; components come out in reverse topological order."""
    index = [-1] * n_nodes
    low = [0] * n_nodes
    on_stack = [False] * n_nodes
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n_nodes):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            nbrs = succ[v]
            while i < len(nbrs):
                w = nbrs[i][1]
                i += 1
                if index[w] < 0:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comps


def build_reachability_graph(
    net: PetriNet, start: Optional[Marking] = None, max_states: Optional[int] = None
) -> ReachabilityGraph:
    """Breadth-first closure of the start marking (default: initial) under firing."""
    root = net.initial if start is None else net.check_marking(start)
    nodes = [root]
    index = {root: 0}
    edges = []
    succ: list[list[tuple[int, int]]] = []
    queue = deque([0])
    while queue:
        n = queue.popleft()
        m = nodes[n]
        out = []
        for t in sorted(enabled(net, m)):
            try:
                m2 = fire(net, m, t)
            except UnsafeFiring as exc:
                raise UnsafeNet(str(exc)) from None
            d = index.get(m2)
            if d is None:
                if max_states is not None and len(nodes) >= max_states:
                    raise StateLimitExceeded(f"more than {max_states} reachable markings")
                d = index[m2] = len(nodes)
                nodes.append(m2)
                queue.append(d)
            edges.append((n, t, d))
            out.append((t, d))
        while len(succ) <= n:
            succ.append([])
        succ[n] = out
    succ_t = tuple(tuple(s) for s in succ)
    comps = _tarjan(len(nodes), succ_t)
    comps.sort(key=lambda c: c[0])
    scc_of = [0] * len(nodes)
    for i, comp in enumerate(comps):
        for v in comp:
            scc_of[v] = i
    terminal = frozenset(
        i for i, comp in enumerate(comps)
        if all(scc_of[d] == i for v in comp for _, d in succ_t[v])
    )
    return ReachabilityGraph(
        net=net,
        nodes=tuple(nodes),
        index=index,
        root=0,
        edges=tuple(edges),
        succ=succ_t,
        sccs=tuple(frozenset(c) for c in comps),
        scc_of=tuple(scc_of),
        terminal_scc_ids=terminal,
    )


# -- attractors and basins ----------------------------------------------------

@dataclass(frozen=True)
class Attractor:
    markings: frozenset  # node indices of one terminal SCC
    fixed_point: bool


def attractors(graph: ReachabilityGraph) -> list[Attractor]:
    result = []
    for i in sorted(graph.terminal_scc_ids, key=lambda i: min(graph.sccs[i])):
        comp = graph.sccs[i]
        fixed = len(comp) == 1 and all(d == v for v in comp for _, d in graph.succ[v])
        result.append(Attractor(markings=comp, fixed_point=fixed))
    return result


def basin(graph: ReachabilityGraph, a: Attractor) -> frozenset:
    """Nodes from which every maximal path enters ``a``.

    Grown from ``a`` as a least fixpoint: a node joins once it has a successor
    and all its successors are already in.  Deadlocks outside ``a`` and cycles
    avoiding ``a`` never join.
    """
    inside = set(a.markings)
    changed = True
    while changed:
        changed = False
        for v in range(len(graph.nodes)):
            if v in inside:
                continue
            succ = graph.successors(v)
            if succ and succ <= inside:
                inside.add(v)
                changed = True
    return frozenset(inside)


def _distances_to(graph: ReachabilityGraph, targets: Iterable[int]) -> list[Optional[int]]:
    preds = graph.predecessors()
    dist: list[Optional[int]] = [None] * len(graph.nodes)
    queue = deque()
    for v in targets:
        dist[v] = 0
        queue.append(v)
    while queue:
        v = queue.popleft()
        for u in preds[v]:
            if dist[u] is None:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def attractor_distance(graph: ReachabilityGraph, m: Union[Marking, int]) -> int:
    """Length of a shortest firing sequence from ``m`` into some attractor."""
    n = m if isinstance(m, int) else graph.node(m)
    atts = [v for a in attractors(graph) for v in a.markings]
    return _distances_to(graph, atts)[n]


def net_distance(graph: ReachabilityGraph) -> int:
    atts = [v for a in attractors(graph) for v in a.markings]
    return max(_distances_to(graph, atts))


# -- simulation and situation fairness ----------------------------------------

@dataclass(frozen=True)
class RoundRobin:
    """Per-marking round robin: the k-th visit of M fires enabled(M)[k mod n]."""

    def describe(self) -> str:
        return "round-robin"


@dataclass(frozen=True)
class Scripted:
    word: tuple[int, ...]
    cyclic: bool = True

    def describe(self) -> str:
        return "script:" + ",".join(map(str, self.word)) + ("" if self.cyclic else " (once)")


@dataclass(frozen=True)
class FairnessTrace:
    net: PetriNet = field(repr=False)
    steps: tuple[tuple[Marking, int], ...]
    terminal_marking: Marking
    policy: Union[RoundRobin, Scripted]
    entered_attractor: Optional[tuple[Attractor, int]] = None

    @property
    def deadlocked(self) -> bool:
        return not enabled(self.net, self.terminal_marking)

    def fired(self) -> list[int]:
        return [t for _, t in self.steps]


def simulate(
    net: PetriNet,
    policy: Union[RoundRobin, Scripted],
    max_steps: int,
    graph: Optional[ReachabilityGraph] = None,
) -> FairnessTrace:
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    m = net.initial
    steps = []
    visits: dict[Marking, int] = {}
    pos = 0
    while len(steps) < max_steps:
        en = sorted(enabled(net, m))
        if not en:
            break
        if isinstance(policy, RoundRobin):
            k = visits.get(m, 0)
            visits[m] = k + 1
            t = en[k % len(en)]
        else:
            if not policy.word or (not policy.cyclic and pos >= len(policy.word)):
                break
            t = policy.word[pos % len(policy.word)]
            pos += 1
            if t not in en:
                raise ScriptNotFireable(
                    f"scripted {net.transitions[t]} not enabled at {net.format_marking(m)} (step {len(steps)})"
                )
        steps.append((m, t))
        m = fire(net, m, t)

    if graph is None:
        graph = build_reachability_graph(net)
    entered = None
    visited = [s for s, _ in steps] + [m]
    for a in attractors(graph):
        members = {graph.nodes[v] for v in a.markings}
        if m in members:
            entry = len(visited) - 1
            while entry > 0 and visited[entry - 1] in members:
                entry -= 1
            entered = (a, entry)
            break
    return FairnessTrace(net=net, steps=tuple(steps), terminal_marking=m, policy=policy,
                         entered_attractor=entered)


def lasso_cycle(trace: FairnessTrace) -> Optional[tuple[tuple[Marking, int], ...]]:
    """Shortest periodic suffix: the last ``p`` steps repeat the ``p`` before them
    and the trace ends where that cycle starts."""
    steps = trace.steps
    for p in range(1, len(steps) // 2 + 1):
        if steps[-p:] == steps[-2 * p:-p] and trace.terminal_marking == steps[-p][0]:
            return steps[-p:]
    return None


def is_situation_fair(trace: FairnessTrace) -> bool:
    if trace.deadlocked:
        return True
    cycle = lasso_cycle(trace)
    if cycle is None:
        raise NotDecidable("trace is truncated without a detected lasso")
    pairs = set(cycle)
    for m in {s for s, _ in cycle}:
        if any((m, t) not in pairs for t in enabled(trace.net, m)):
            return False
    return True

import pytest

from cliffedge import (
    PetriNet,
    RoundRobin,
    Scripted,
    attractor_distance,
    attractors,
    basin,
    build_reachability_graph,
    enabled,
    fire,
    is_situation_fair,
    net_distance,
    simulate,
)
from cliffedge.errors import (
    MalformedNet,
    NotDecidable,
    NotEnabled,
    ScriptNotFireable,
    SourceTransition,
    StateLimitExceeded,
    UnsafeFiring,
    UnsafeNet,
)


def t_names(net, ts):
    return {net.transitions[t] for t in ts}


def m(net, *names):
    return net.marking(names)


def test_enabled_at_initial(run):
    assert t_names(run, enabled(run, m(run, "p1", "p2"))) == {"alpha", "beta", "gamma", "delta"}


def test_enabled_at_deadlock_and_empty(run):
    assert enabled(run, m(run, "p8")) == frozenset()
    assert enabled(run, frozenset()) == frozenset()


def test_fire_examples(run):
    a = run.transition_id("alpha")
    k = run.transition_id("kappa")
    assert fire(run, m(run, "p1", "p2"), a) == m(run, "p3", "p2")
    assert fire(run, m(run, "p7"), k) == m(run, "p1", "p2")
    with pytest.raises(NotEnabled):
        fire(run, m(run, "p8"), run.transition_id("xi"))


def test_fire_unsafe():
    net = PetriNet.build(["p", "q"], {"t": (["p"], ["q"])}, ["p", "q"])
    with pytest.raises(UnsafeFiring):
        fire(net, net.initial, 0)
    with pytest.raises(UnsafeNet):
        build_reachability_graph(net)


def test_source_transition_rejected():
    with pytest.raises(SourceTransition):
        PetriNet.build(["p"], {"t": ([], ["p"])}, [])


def test_duplicate_and_dangling_names_rejected():
    with pytest.raises(MalformedNet):
        PetriNet(("p", "p"), ("t",), (frozenset({0}),), (frozenset(),), frozenset())
    with pytest.raises(MalformedNet):
        PetriNet.build(["p"], {"t": (["p"], ["nowhere"])}, [])


def test_run_graph_has_eleven_nodes(run_graph):
    assert len(run_graph.nodes) == 11


def test_fair_graph_nodes(fair):
    g = build_reachability_graph(fair)
    expected = {m(fair, *s) for s in (("p1", "p2"), ("p3", "p2"), ("p1", "p4"), ("p3", "p4"), ("A",))}
    assert set(g.nodes) == expected


def test_self_loop_graph():
    net = PetriNet.build(["p"], {"t": (["p"], ["p"])}, ["p"])
    g = build_reachability_graph(net)
    assert len(g.nodes) == 1 and g.edges == ((0, 0, 0),)


def test_state_limit():
    net = PetriNet.build(["p", "q"], {"t": (["p"], ["q"])}, ["p"])
    with pytest.raises(StateLimitExceeded):
        build_reachability_graph(net, max_states=1)


def test_run_single_fixed_point_attractor(run, run_graph):
    atts = attractors(run_graph)
    assert len(atts) == 1
    assert {run_graph.nodes[v] for v in atts[0].markings} == {m(run, "p8")}
    assert atts[0].fixed_point


def test_fair_attractor(fair):
    g = build_reachability_graph(fair)
    (att,) = attractors(g)
    assert {g.nodes[v] for v in att.markings} == {m(fair, "A")} and att.fixed_point
    assert {g.nodes[v] for v in basin(g, att)} == {m(fair, "A")}


def test_cycle_attractor_not_fixed():
    net = PetriNet.build(["a", "b"], {"f": (["a"], ["b"]), "g": (["b"], ["a"])}, ["a"])
    g = build_reachability_graph(net)
    (att,) = attractors(g)
    assert len(att.markings) == 2 and not att.fixed_point
    assert basin(g, att) == frozenset(range(2))


def test_run_basin(run, run_graph):
    (att,) = attractors(run_graph)
    got = {run_graph.nodes[v] for v in basin(run_graph, att)}
    assert got == {m(run, "p8"), m(run, "p3", "p5"), m(run, "p4", "p6")}


def test_distances(run, run_graph):
    assert attractor_distance(run_graph, m(run, "p3", "p5")) == 1
    assert attractor_distance(run_graph, m(run, "p8")) == 0
    assert net_distance(run_graph) == 5


def test_scripted_fair_lasso_never_reaches_attractor(fair):
    word = tuple(fair.transition_id(t) for t in "badc")
    tr = simulate(fair, Scripted(word), 1000)
    assert len(tr.steps) == 1000
    assert tr.entered_attractor is None
    assert fair.transition_id("x") not in tr.fired()
    assert is_situation_fair(tr) is False


def test_round_robin_reaches_fixed_point(fair):
    tr = simulate(fair, RoundRobin(), 10_000)
    assert tr.entered_attractor is not None
    att, idx = tr.entered_attractor
    assert att.fixed_point and tr.terminal_marking == m(fair, "A")
    assert tr.deadlocked and is_situation_fair(tr)
    assert idx == len(tr.steps)


def test_deadlocked_start():
    net = PetriNet.build(["p", "q"], {"t": (["q"], ["p"])}, ["p"])
    tr = simulate(net, RoundRobin(), 50)
    assert tr.steps == () and tr.terminal_marking == net.initial
    assert is_situation_fair(tr)


def test_self_loop_round_robin_is_fair():
    net = PetriNet.build(["p"], {"t": (["p"], ["p"])}, ["p"])
    assert is_situation_fair(simulate(net, RoundRobin(), 20))


def test_truncated_trace_not_decidable(fair):
    word = tuple(fair.transition_id(t) for t in "badc")
    tr = simulate(fair, Scripted(word), 3)
    with pytest.raises(NotDecidable):
        is_situation_fair(tr)


def test_script_not_fireable(fair):
    with pytest.raises(ScriptNotFireable):
        simulate(fair, Scripted((fair.transition_id("a"),)), 5)

import itertools

import pytest

from cliffedge import (
    CutoffPolicy,
    ErvTotalOrder,
    PetriNet,
    SubsetOrder,
    build_reachability_graph,
    causal,
    compare,
    concurrent,
    cone,
    crest,
    cut,
    direct_conflict,
    enabled_events,
    enumerate_configurations,
    in_conflict,
    is_configuration,
    mark,
    stump,
    unfold,
)
from cliffedge.errors import (
    CapExceeded,
    DifferentPrefixes,
    EventLimitExceeded,
    NotAConfiguration,
    UnknownEvent,
    UnknownNode,
)
from cliffedge.unfold import BAD_MARKING, MARKING_REPEAT

from conftest import ev, names


def kappa_after(prefix, other):
    """The kappa event whose cone contains ``other``."""
    o = prefix.event_by_name(other)
    (k,) = [e for e in prefix.events_of("kappa") if o in prefix.cones[e]]
    return k


def test_loop_prefix_shape(run_prefix):
    folds = sorted(run_prefix.net.transitions[e.transition] for e in run_prefix.events)
    assert folds == sorted(["alpha", "beta", "gamma", "delta", "xi", "theta", "zeta", "eta", "kappa", "kappa"])
    cut_off = {run_prefix.net.transitions[run_prefix.events[e].transition] for e in run_prefix.cutoffs()}
    assert cut_off == {"kappa"} and len(run_prefix.cutoffs()) == 2
    assert all(run_prefix.events[e].cutoff_reason == MARKING_REPEAT for e in run_prefix.cutoffs())


def test_erv_prefix_cuts_one_of_each_equal_marking_pair(run_erv):
    # theta/zeta and xi/eta cones have equal size and marking: a total order must cut one
    cut_off = {run_erv.event_name(e) for e in run_erv.cutoffs()}
    assert cut_off == {"zeta#1", "eta#1", "kappa#1"}
    assert len(run_erv.events) == 9


def test_single_transition_prefix():
    net = PetriNet.build(["p", "q"], {"t": (["p"], ["q"])}, ["p"])
    pf = unfold(net)
    assert len(pf.events) == 1 and not pf.cutoffs()


def test_bad_cutoff_from_p3_p5(run):
    start = run.marking(["p3", "p5"])
    bad = run.marking(["p8"])
    pol = CutoffPolicy(extra_bad_cutoff=True, is_bad=lambda mk: mk == bad)
    pf = unfold(run, start, SubsetOrder(), pol)
    assert len(pf.events) == 1
    (e,) = pf.events
    assert run.transitions[e.transition] == "xi" and e.cutoff and e.cutoff_reason == BAD_MARKING


def test_policy_consistency():
    with pytest.raises(ValueError):
        CutoffPolicy(loop_subset_mode=True).check(ErvTotalOrder())
    with pytest.raises(ValueError):
        CutoffPolicy(extra_bad_cutoff=True).check(SubsetOrder())


def test_event_limit(run):
    with pytest.raises(EventLimitExceeded) as info:
        unfold(run, max_events=3)
    assert info.value.limit == 3 and info.value.appended == 3


def test_cone_and_stump(run_prefix):
    xi = run_prefix.event_by_name("xi#1")
    assert names(run_prefix, cone(run_prefix, xi).events) == ["alpha#1", "gamma#1", "xi#1"]
    assert stump(run_prefix, run_prefix.event_by_name("alpha#1")).events == frozenset()
    k = kappa_after(run_prefix, "zeta#1")
    assert names(run_prefix, cone(run_prefix, k).events) == sorted(
        ["beta#1", "gamma#1", "zeta#1", run_prefix.event_name(k)]
    )
    with pytest.raises(UnknownEvent):
        cone(run_prefix, 99)


def test_crest(run_prefix):
    xi = run_prefix.event_by_name("xi#1")
    assert crest(run_prefix, cone(run_prefix, xi)) == {xi}
    ag = ev(run_prefix, "alpha#1", "gamma#1")
    assert crest(run_prefix, ag) == ag
    assert crest(run_prefix, frozenset()) == frozenset()


def test_cut_and_mark(run, run_prefix):
    assert mark(run_prefix, ev(run_prefix, "beta#1", "gamma#1")) == run.marking(["p4", "p5"])
    assert mark(run_prefix, frozenset()) == run.marking(["p1", "p2"])
    assert cut(run_prefix, frozenset()) == run_prefix.initial_cut
    assert mark(run_prefix, ev(run_prefix, "alpha#1", "gamma#1", "xi#1")) == run.marking(["p8"])


def test_relations(run_prefix):
    a, b, g, x = (run_prefix.event_by_name(n) for n in ("alpha#1", "beta#1", "gamma#1", "xi#1"))
    assert in_conflict(run_prefix, a, b)
    assert direct_conflict(run_prefix, a, b)
    assert concurrent(run_prefix, a, g)
    assert causal(run_prefix, a, x) and not causal(run_prefix, x, a)
    with pytest.raises(UnknownNode):
        causal(run_prefix, a, 999)


def test_relations_trichotomy(run_prefix):
    nodes = [("e", e) for e in range(len(run_prefix.events))] + [
        ("b", b) for b in range(len(run_prefix.conditions))
    ]
    for x, y in itertools.product(nodes, repeat=2):
        hits = [x == y, causal(run_prefix, x, y) or causal(run_prefix, y, x),
                in_conflict(run_prefix, x, y), concurrent(run_prefix, x, y)]
        assert sum(hits) == 1, (x, y, hits)


def test_enabled_events(run_prefix):
    assert names(run_prefix, enabled_events(run_prefix, frozenset())) == [
        "alpha#1", "beta#1", "delta#1", "gamma#1"]
    assert names(run_prefix, enabled_events(run_prefix, ev(run_prefix, "alpha#1", "gamma#1"))) == ["xi#1"]
    with pytest.raises(NotAConfiguration):
        enabled_events(run_prefix, ev(run_prefix, "alpha#1", "beta#1"))


def test_is_configuration(run_prefix):
    assert is_configuration(run_prefix, ev(run_prefix, "alpha#1", "gamma#1"))
    assert not is_configuration(run_prefix, ev(run_prefix, "xi#1"))
    assert not is_configuration(run_prefix, ev(run_prefix, "alpha#1", "beta#1"))


def test_compare(run_prefix):
    a, b = ev(run_prefix, "alpha#1"), ev(run_prefix, "beta#1")
    k = cone(run_prefix, kappa_after(run_prefix, "zeta#1"))
    empty = run_prefix.configuration(frozenset())
    assert compare(ErvTotalOrder(), empty, k) == "less"
    assert compare(SubsetOrder(), a, b, run_prefix) == "incomparable"
    assert compare(ErvTotalOrder(), a, b, run_prefix) == "less"
    assert compare(SubsetOrder(), empty, k) == "less"
    assert compare(ErvTotalOrder(), k, k) == "equal"


def test_compare_other_prefix(run, run_prefix, run_erv):
    with pytest.raises(DifferentPrefixes):
        compare(ErvTotalOrder(), run_prefix.configuration(()), run_erv.configuration(()))


def test_enumerate_small():
    net = PetriNet.build(["p", "q"], {"t": (["p"], ["q"])}, ["p"])
    pf = unfold(net)
    assert [c.events for c in enumerate_configurations(pf)] == [frozenset(), frozenset({0})]
    net2 = PetriNet.build(["a", "b", "c", "d"], {"s": (["a"], ["b"]), "u": (["c"], ["d"])}, ["a", "c"])
    assert len(list(enumerate_configurations(unfold(net2)))) == 4


def test_enumerate_run(run_prefix):
    confs = {c.events for c in enumerate_configurations(run_prefix)}
    assert ev(run_prefix, "alpha#1", "gamma#1") in confs
    assert ev(run_prefix, "beta#1", "delta#1") in confs
    sizes = [len(c) for c in enumerate_configurations(run_prefix)]
    assert sizes == sorted(sizes)
    with pytest.raises(CapExceeded):
        list(enumerate_configurations(run_prefix, cap=3))


def test_homomorphism_and_parsimony(run_prefix, run_erv):
    for pf in (run_prefix, run_erv):
        net = pf.net
        seen = set()
        for e in pf.events:
            assert sorted(pf.conditions[b].place for b in e.preset) == sorted(net.pre[e.transition])
            assert sorted(pf.conditions[b].place for b in e.postset) == sorted(net.post[e.transition])
            assert (e.transition, e.preset) not in seen
            seen.add((e.transition, e.preset))
        assert sorted(pf.conditions[b].place for b in pf.initial_cut) == sorted(pf.start)


def test_no_event_after_cutoff(run_prefix, run_erv):
    for pf in (run_prefix, run_erv):
        for e in range(len(pf.events)):
            assert not any(pf.events[f].cutoff for f in pf.cones[e] - {e})


def test_completeness(run, run_graph, run_erv):
    confs = list(enumerate_configurations(run_erv))
    by_mark = {}
    for c in confs:
        by_mark.setdefault(mark(run_erv, c), c)
    assert set(by_mark) == set(run_graph.nodes)
    from cliffedge import enabled

    for mk, c in by_mark.items():
        # some configuration reaching mk with no cutoff enables every transition
        covering = [c2 for c2 in confs if mark(run_erv, c2) == mk
                    and not any(run_erv.events[e].cutoff for e in c2.events)]
        assert covering
        for cfg in covering:
            got = {run_erv.events[e].transition for e in enabled_events(run_erv, cfg)}
            if got == enabled(run, mk):
                break
        else:
            pytest.fail(f"marking {run.format_marking(mk)} lacks an extension")


def test_unsafe_net_in_unfold():
    net = PetriNet.build(["p", "q"], {"t": (["p"], ["q"])}, ["p", "q"])
    from cliffedge.errors import UnsafeNet

    with pytest.raises(UnsafeNet):
        unfold(net)


def test_reachability_graph_consistency(run, run_graph):
    assert build_reachability_graph(run).nodes == run_graph.nodes

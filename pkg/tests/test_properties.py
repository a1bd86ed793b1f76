"""Randomised properties over small generated safe nets."""

from functools import lru_cache
from itertools import combinations

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from cliffedge import (
    DoomStatus,
    ErvTotalOrder,
    RoundRobin,
    SubsetOrder,
    attractor_distance,
    attractors,
    basin,
    build_reachability_graph,
    close_bad,
    compare,
    concurrent,
    crest,
    emit_pep,
    enabled,
    fire,
    is_unchallenged,
    net_distance,
    oracle_loops,
    parse_pep,
    protectedness,
    shave,
    simulate,
    strict_opponents,
    unfold,
)
from cliffedge.protect import plain_opponents
from cliffedge.errors import StateLimitExceeded, UnsafeNet
from cliffedge.fixtures import FIXTURES

from checks import (
    Case,
    classify_agrees,
    dheight_monotone,
    mindoo_agrees,
    prefix_bounded,
    ridges_found,
    shave_keeps_doom,
)
from conftest import loop_prefix
from randnets import random_net

seeds = st.integers(0, 20_000)
prop = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


@lru_cache(maxsize=None)
def _case(seed):
    net = random_net(seed)
    try:
        graph = build_reachability_graph(net, max_states=64)
    except (UnsafeNet, StateLimitExceeded):
        return None
    return Case(seed, net, graph)


def case_for(seed):
    case = _case(seed)
    assume(case is not None)
    return case


# -- marking graph ------------------------------------------------------------------

@prop
@given(seeds)
def test_firing_changes_token_count_by_arc_balance(seed):
    c = case_for(seed)
    net = c.net
    for m in c.graph.nodes:
        for t in enabled(net, m):
            assert len(fire(net, m, t)) == len(m) - len(net.pre[t]) + len(net.post[t])


@prop
@given(seeds)
def test_graph_size_and_reachability(seed):
    c = case_for(seed)
    g = c.graph
    assert len(g.nodes) <= 2 ** len(c.net.places)
    seen, stack = {0}, [0]
    while stack:
        for d in g.successors(stack.pop()):
            if d not in seen:
                seen.add(d)
                stack.append(d)
    assert len(seen) == len(g.nodes)


@prop
@given(seeds)
def test_attractors_and_basins_absorbing(seed):
    g = case_for(seed).graph
    for a in attractors(g):
        for v in a.markings:
            assert g.successors(v) <= a.markings
        b = basin(g, a)
        assert a.markings <= b
        for v in b - a.markings:
            assert g.successors(v) and g.successors(v) <= b


@prop
@given(seeds)
def test_distance_zero_iff_in_attractor(seed):
    g = case_for(seed).graph
    inside = set().union(*(a.markings for a in attractors(g)))
    for v in range(len(g.nodes)):
        assert (attractor_distance(g, v) == 0) == (v in inside)


@prop
@given(seeds)
def test_round_robin_reaches_attractor(seed):
    c = case_for(seed)
    g = c.graph
    budget = 10 * max(net_distance(g), 1) * len(g.nodes) * len(c.net.transitions)
    trace = simulate(c.net, RoundRobin(), budget, graph=g)
    if trace.deadlocked:
        assert trace.entered_attractor is not None and trace.entered_attractor[0].fixed_point
    else:
        assert trace.entered_attractor is not None


# -- prefixes -----------------------------------------------------------------------

@prop
@given(seeds)
def test_fold_is_homomorphism(seed):
    c = case_for(seed)
    pf, net = c.prefix, c.net
    for e in pf.events:
        pre = [pf.conditions[b].place for b in e.preset]
        post = [pf.conditions[b].place for b in e.postset]
        assert sorted(pre) == sorted(net.pre[e.transition])
        assert sorted(post) == sorted(net.post[e.transition])
    assert sorted(pf.conditions[b].place for b in pf.initial_cut) == sorted(net.initial)


@prop
@given(seeds)
def test_concurrent_conditions_fold_apart(seed):
    pf = unfold(case_for(seed).net, order=ErvTotalOrder())
    assume(len(pf.conditions) <= 40)
    for i, j in combinations(range(len(pf.conditions)), 2):
        if concurrent(pf, ("b", i), ("b", j)):
            assert pf.conditions[i].place != pf.conditions[j].place


@prop
@given(seeds)
def test_orders_refine_inclusion(seed):
    c = case_for(seed)
    confs = c.configs[:60]
    for a in confs:
        for b in confs:
            if a.events <= b.events:
                assert compare(SubsetOrder(), a, b, c.prefix) != "greater"
                assert compare(ErvTotalOrder(), a, b, c.prefix) != "greater"
            assert compare(ErvTotalOrder(), a, b, c.prefix) != "incomparable"


@prop
@given(seeds)
def test_total_orders_bounded_and_complete(seed):
    assert prefix_bounded(case_for(seed)) == []


@prop
@given(seeds)
def test_minimal_loops_visible(seed):
    c = case_for(seed)
    pf = c.prefix
    for w in oracle_loops(c.graph, 0):
        cut_ = pf.initial_cut
        passed_cutoff = False
        for t in w.word():
            nxt = next((f for b in cut_ for f in pf.consumers[b]
                        if pf.events[f].transition == t and pf.events[f].preset <= cut_), None)
            if nxt is None:
                assert passed_cutoff, f"lasso {w.word()} leaves the prefix before any cutoff"
                break
            passed_cutoff |= pf.events[nxt].cutoff
            cut_ = (cut_ - pf.events[nxt].preset) | pf.events[nxt].postset


# -- doom -----------------------------------------------------------------------------

@prop
@given(seeds)
def test_classify_matches_oracle(seed):
    assert classify_agrees(case_for(seed)) == []


@prop
@given(seeds)
def test_mindoo_matches_oracle(seed):
    assert mindoo_agrees(case_for(seed)) == []


@prop
@given(seeds)
def test_ridges_witnessed(seed):
    assert ridges_found(case_for(seed)) == []


@prop
@given(seeds)
def test_bad_is_upward_closed(seed):
    c = case_for(seed)
    bad = [c.oracle.of(c.prefix.mark_of(x.events)) is DoomStatus.BAD for x in c.configs]
    for (a, ba), (b, bb) in combinations(zip(c.configs, bad), 2):
        if ba and a.events <= b.events:
            assert bb
        if bb and b.events <= a.events:
            assert ba


@prop
@given(seeds)
def test_mindoo_members_rub_to_free(seed):
    c = case_for(seed)
    pf = c.prefix
    for m in c.mindoo.mindoo:
        assert c.oracle.of(pf.mark_of(m.events)) is not DoomStatus.FREE
        for e in crest(pf, m):
            assert c.oracle.of(pf.mark_of(m.events - {e})) is DoomStatus.FREE
        # unshaved members only where shaving would free them
        if any(is_unchallenged(pf, e) for e in crest(pf, m)):
            assert c.oracle.of(pf.mark_of(shave(pf, m).events)) is DoomStatus.FREE


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_shave_keeps_doom_on_fixtures(name):
    factory, bad = FIXTURES[name]
    net = factory()
    g = build_reachability_graph(net)
    case = Case(0, net, g)
    case.spec = close_bad(g, [net.marking(b) for b in bad])
    assert shave_keeps_doom(case) == []


def test_shave_can_free_a_doomed_configuration():
    # a concurrent self-loop can starve an unchallenged event forever
    case = _case(184)
    assert shave_keeps_doom(case)
    assert mindoo_agrees(case) == []


# -- heights and protectedness ------------------------------------------------------

@prop
@given(seeds)
def test_dheight_monotone(seed):
    assert dheight_monotone(case_for(seed)) == []


@prop
@given(seeds)
def test_plain_conflict_contains_strict(seed):
    c = case_for(seed)
    for x in c.configs[:80]:
        assert strict_opponents(c.prefix, x) <= plain_opponents(c.prefix, x)


@prop
@given(seeds)
def test_doomed_configurations_have_zero_protectedness(seed):
    c = case_for(seed)
    for x in c.configs[:40]:
        if c.oracle.of(c.prefix.mark_of(x.events)) is not DoomStatus.FREE:
            assert str(protectedness(c.prefix, x, c.mindoo, c.spec)) == "0"


@prop
@given(seeds)
def test_pep_roundtrip(seed):
    net = random_net(seed)
    assert parse_pep(emit_pep(net)) == net


def test_loop_prefix_helper_matches_case():
    case = _case(0)
    assert len(loop_prefix(case.net).events) == len(case.prefix.events)

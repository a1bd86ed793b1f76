import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cliffedge import (  # noqa: E402
    CutoffPolicy,
    ErvTotalOrder,
    SubsetOrder,
    build_reachability_graph,
    close_bad,
    min_doo,
    unfold,
)
from cliffedge.fixtures import conf_net, fair_net, race_net, run_net  # noqa: E402


def loop_prefix(net, start=None):
    return unfold(net, start, SubsetOrder(), CutoffPolicy(loop_subset_mode=True))


def names(prefix, events):
    return sorted(prefix.event_name(e) for e in events)


def ev(prefix, *names_):
    return frozenset(prefix.event_by_name(n) for n in names_)


@pytest.fixture(scope="session")
def run():
    return run_net()


@pytest.fixture(scope="session")
def run_graph(run):
    return build_reachability_graph(run)


@pytest.fixture(scope="session")
def run_spec(run, run_graph):
    return close_bad(run_graph, [run.marking(["p8"])])


@pytest.fixture(scope="session")
def run_prefix(run):
    """Inclusion-ordered prefix with loop cutoffs: ten events, the two kappas cut."""
    return loop_prefix(run)


@pytest.fixture(scope="session")
def run_erv(run):
    return unfold(run, order=ErvTotalOrder())


@pytest.fixture(scope="session")
def run_mindoo(run_prefix, run_spec):
    return min_doo(run_prefix, run_spec)


@pytest.fixture(scope="session")
def fair():
    return fair_net()


@pytest.fixture(scope="session")
def conf():
    return conf_net()


@pytest.fixture(scope="session")
def conf_prefix(conf):
    return unfold(conf)


@pytest.fixture(scope="session")
def race():
    return race_net()


@pytest.fixture(scope="session")
def race_setup(race):
    g = build_reachability_graph(race)
    spec = close_bad(g, [race.marking(["b5", "b7"])])
    pf = unfold(race)
    return pf, spec, min_doo(pf, spec)


ACCEPTANCE_LINES: list = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

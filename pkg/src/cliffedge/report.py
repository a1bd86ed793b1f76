"""Analysis session, deterministic JSON reports, status tables and figures."""

from __future__ import annotations

import csv
import json
import time
from collections import Counter
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

from .doom import DoomStatus, close_bad, free_check, min_doo
from .net import (
    PetriNet,
    attractor_distance,
    attractors,
    basin,
    build_reachability_graph,
    net_distance,
)
from .oracle import oracle_classify, oracle_mindoo, oracle_ridges
from .protect import HeightMode, protectedness
from .unfold import CutoffPolicy, Prefix, SubsetOrder, enumerate_configurations, unfold

SCHEMA_VERSION = 1


class Analysis:
    """Lazily computed analyses of one net and bad set, shared across report sections."""

    def __init__(self, net: PetriNet, raw_bad: Iterable = (), max_events: int = 10_000,
                 max_states: Optional[int] = None, cap: int = 200_000):
        self.net = net
        self.limits = {"max_events": max_events}
        self.cap = cap
        self.timings: dict[str, float] = {}
        t0 = time.perf_counter()
        self.graph = build_reachability_graph(net, max_states=max_states)
        self.spec = close_bad(self.graph, raw_bad)
        self.timings["reachability"] = time.perf_counter() - t0
        self._free: dict = {}

    def _timed(self, key, fn):
        t0 = time.perf_counter()
        out = fn()
        self.timings[key] = self.timings.get(key, 0.0) + time.perf_counter() - t0
        return out

    # doom analyses run on the inclusion-ordered prefix with loop cutoffs
    @cached_property
    def prefix(self) -> Prefix:
        policy = CutoffPolicy(loop_subset_mode=True)
        return self._timed("unfold", lambda: unfold(self.net, None, SubsetOrder(), policy, **self.limits))

    def is_free(self, m) -> bool:
        if m not in self._free:
            self._free[m] = free_check(self.net, m, self.spec, **self.limits)
        return self._free[m]

    def status_of(self, m) -> DoomStatus:
        n = self.graph.index[m]
        if n in self.spec.closed:
            return DoomStatus.BAD
        return DoomStatus.FREE if self.is_free(m) else DoomStatus.DOOMED

    @cached_property
    def status(self) -> tuple:
        return self._timed("classify", lambda: tuple(self.status_of(m) for m in self.graph.nodes))

    @cached_property
    def oracle(self):
        return self._timed("oracle", lambda: oracle_classify(self.graph, self.spec))

    @cached_property
    def mindoo(self):
        return self._timed("mindoo", lambda: min_doo(self.prefix, self.spec, self.cap, **self.limits))

    @cached_property
    def representatives(self) -> dict:
        """Smallest prefix configuration reaching each marking."""
        reps: dict = {}
        for c in enumerate_configurations(self.prefix, self.cap):
            reps.setdefault(self.prefix.mark_of(c.events), c)
        return reps

    def protectedness_of(self, c, mode=HeightMode.OPPONENT):
        status = self.status_of(self.prefix.mark_of(c.events))
        return protectedness(self.prefix, c, self.mindoo, self.spec, mode, status)


# -- serialisation helpers --------------------------------------------------------

def marking_json(net: PetriNet, m) -> list[str]:
    return list(net.marking_names(m))


def config_json(prefix: Prefix, events) -> list[str]:
    return sorted(prefix.event_name(e) for e in events)


def _sorted_lists(items):
    return sorted(items, key=lambda x: (len(x), x))


def net_section(a: Analysis) -> dict:
    net = a.net
    return {
        "places": list(net.places),
        "transitions": list(net.transitions),
        "initial": marking_json(net, net.initial),
        "reachable_markings": len(a.graph.nodes),
        "edges": len(a.graph.edges),
    }


def graph_section(a: Analysis) -> dict:
    net, g = a.net, a.graph
    return {
        "markings": [marking_json(net, m) for m in g.nodes],
        "edges": sorted([net.format_marking(g.nodes[s]), net.transitions[t], net.format_marking(g.nodes[d])]
                        for s, t, d in g.edges),
        "scc_count": len(g.sccs),
    }


def attractor_section(a: Analysis) -> dict:
    net, g = a.net, a.graph
    atts = []
    for att in attractors(g):
        atts.append({
            "markings": _sorted_lists(marking_json(net, g.nodes[v]) for v in att.markings),
            "fixed_point": att.fixed_point,
            "basin": _sorted_lists(marking_json(net, g.nodes[v]) for v in basin(g, att)),
        })
    return {"attractors": atts, "net_distance": net_distance(g)}


def bad_section(a: Analysis) -> dict:
    net, g = a.net, a.graph
    return {
        "raw": _sorted_lists(marking_json(net, m) for m in a.spec.raw),
        "closed": _sorted_lists(marking_json(net, g.nodes[n]) for n in a.spec.closed),
    }


def status_section(a: Analysis, with_oracle: bool = False) -> dict:
    net, g = a.net, a.graph
    rows = []
    for n, m in enumerate(g.nodes):
        row = {"marking": marking_json(net, m), "status": str(a.status[n])}
        if with_oracle:
            row["oracle"] = str(a.oracle.status[n])
        rows.append(row)
    out = {"markings": rows, "counts": dict(sorted(Counter(str(s) for s in a.status).items()))}
    if with_oracle:
        out["oracle_diffs"] = sum(1 for r in rows if r["status"] != r["oracle"])
    return out


def mindoo_section(a: Analysis, with_oracle: bool = False) -> dict:
    net, pf, res = a.net, a.prefix, a.mindoo
    out = {
        "mindoo": _sorted_lists(config_json(pf, c.events) for c in res.mindoo),
        "cliff_edges": _sorted_lists(config_json(pf, ce) for ce in res.cliff_edges),
        "ridges": _sorted_lists(sorted(net.transitions[t] for t in r) for r in res.ridges),
        "freeness_checks": res.stats["freeness_checks"],
        "prefix_events": len(pf.events),
    }
    if with_oracle:
        ref = {c.events for c in a._timed("oracle", lambda: oracle_mindoo(pf, a.oracle, a.cap))}
        ridges = a._timed("oracle", lambda: oracle_ridges(net, a.spec))
        mine = {c.events for c in res.mindoo}
        out["oracle"] = {
            "mindoo_diffs": len(ref ^ mine),
            "ridges": _sorted_lists(sorted(net.transitions[t] for t in r) for r in ridges),
            "ridges_witnessed": set(ridges) <= set(res.ridges),
        }
    return out


def protect_rows(a: Analysis, mode=HeightMode.OPPONENT) -> list[dict]:
    net, pf = a.net, a.prefix
    rows = []
    for m in a.graph.nodes:
        c = a.representatives.get(m)
        if c is None:
            continue
        rows.append({
            "marking": marking_json(net, m),
            "configuration": config_json(pf, c.events),
            "status": str(a.status_of(m)),
            "protectedness": str(a.protectedness_of(c, mode)),
        })
    return rows


def full_report(a: Analysis, command: str, with_oracle: bool = False) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "net": net_section(a),
        **attractor_section(a),
        "bad": bad_section(a),
        "classification": status_section(a, with_oracle),
        **mindoo_section(a, with_oracle),
        "protectedness": protect_rows(a),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_table(path, header: list[str], rows: Iterable[list]) -> None:
    """CSV, or TSV when the file name ends in ``.tsv``."""
    path = Path(path)
    delim = "\t" if path.suffix == ".tsv" else ","
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter=delim, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def status_table_rows(a: Analysis) -> list[list]:
    net, g = a.net, a.graph
    inside = set()
    for att in attractors(g):
        inside |= basin(g, att)
    return [
        [net.format_marking(m), str(a.status[n]), attractor_distance(g, n), n in inside]
        for n, m in enumerate(g.nodes)
    ]


STATUS_HEADER = ["marking", "status", "attractor_distance", "in_basin"]


# -- figures ------------------------------------------------------------------------

_COLOURS = {"bad": "#cc4125", "doomed": "#e69138", "free": "#6aa84f"}


def _layered_positions(graph) -> dict[int, tuple[float, float]]:
    """Nodes placed by BFS depth from the root, centred per layer."""
    depth = {graph.root: 0}
    order = [graph.root]
    for n in order:
        for _, d in graph.succ[n]:
            if d not in depth:
                depth[d] = depth[n] + 1
                order.append(d)
    layers: dict[int, list[int]] = {}
    for n in order:
        layers.setdefault(depth[n], []).append(n)
    pos = {}
    for k, nodes in layers.items():
        for i, n in enumerate(nodes):
            pos[n] = (i - (len(nodes) - 1) / 2, -k)
    return pos


def render_figures(a: Analysis, outdir, with_protect: bool = True) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    net, g = a.net, a.graph
    written = []

    pos = _layered_positions(g)
    fig, ax = plt.subplots(figsize=(max(6, len(g.nodes) * 0.6), 6))
    for s, t, d in g.edges:
        (x0, y0), (x1, y1) = pos[s], pos[d]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops={"arrowstyle": "->", "color": "#888888", "lw": 0.8})
        ax.text((x0 + x1) / 2, (y0 + y1) / 2, net.transitions[t], fontsize=7, color="#444444")
    for n, m in enumerate(g.nodes):
        x, y = pos[n]
        ax.scatter([x], [y], s=500, color=_COLOURS[str(a.status[n])], zorder=3)
        ax.text(x, y - 0.25, net.format_marking(m), ha="center", va="top", fontsize=7)
    ax.set_axis_off()
    ax.set_title("reachable markings by doom status")
    handles = [plt.Line2D([], [], marker="o", ls="", color=c, label=k) for k, c in _COLOURS.items()]
    ax.legend(handles=handles, loc="upper right", fontsize=8)
    path = outdir / "doom_graph.png"
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    written.append(path)

    if with_protect:
        rows = protect_rows(a)
        fig, ax = plt.subplots(figsize=(max(6, len(rows) * 0.5), 4))
        labels = ["".join(net.format_marking(net.marking(r["marking"]))) for r in rows]
        vals, cols = [], []
        top = max([int(r["protectedness"]) for r in rows if r["protectedness"] != "safe"] + [0]) + 1
        for r in rows:
            p = r["protectedness"]
            vals.append(top if p == "safe" else int(p))
            cols.append("#3d85c6" if p == "safe" else _COLOURS[r["status"]])
        ax.bar(range(len(rows)), vals, color=cols)
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
        ax.set_ylabel("protectedness (top bar = safe)")
        ax.set_title("protectedness of the smallest configuration per marking")
        path = outdir / "protectedness.png"
        fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written

"""Graphviz DOT export for reachability graphs and prefixes."""

from __future__ import annotations

from typing import Optional

from .net import ReachabilityGraph
from .unfold import Prefix


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(graph: ReachabilityGraph, status: Optional[dict] = None) -> str:
    """``status`` optionally maps node ids to a label suffix used for fill colour."""
    colours = {"bad": "#e06666", "doomed": "#f6b26b", "free": "#b6d7a8"}
    net = graph.net
    lines = ["digraph reachability {", "  node [shape=box];"]
    for n, m in enumerate(graph.nodes):
        attrs = [f"label={_q(net.format_marking(m))}"]
        if n == graph.root:
            attrs.append("penwidth=2")
        if status is not None and n in status:
            attrs += ["style=filled", f"fillcolor={_q(colours.get(str(status[n]), 'white'))}"]
        lines.append(f"  n{n} [{', '.join(attrs)}];")
    for s, t, d in graph.edges:
        lines.append(f"  n{s} -> n{d} [label={_q(net.transitions[t])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def prefix_to_dot(prefix: Prefix) -> str:
    lines = ["digraph prefix {"]
    for b in range(len(prefix.conditions)):
        lines.append(f"  c{b} [shape=ellipse, label={_q(prefix.condition_name(b))}];")
    for e, ev in enumerate(prefix.events):
        style = ", style=dashed" if ev.cutoff else ""
        lines.append(f"  e{e} [shape=box, label={_q(prefix.event_name(e))}{style}];")
    for e, ev in enumerate(prefix.events):
        lines.extend(f"  c{b} -> e{e};" for b in sorted(ev.preset))
        lines.extend(f"  e{e} -> c{b};" for b in sorted(ev.postset))
    lines.append("}")
    return "\n".join(lines) + "\n"

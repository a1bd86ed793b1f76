"""Command-line interface: ``cliffedge <command> NET [BAD] [options]``.

``NET`` is a PEP ``ll_net`` file or ``builtin:<name>`` for one of the bundled
examples (run, fair, conf, race); for built-ins the bad file may be omitted
and the bundled bad set is used.  Exit codes: 0 success, 1 input error,
2 analysis limit hit, 3 oracle disagreement.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Optional

from . import fixtures
from .dot import graph_to_dot, prefix_to_dot
from .errors import CliffedgeError, InputError, NotDecidable
from .net import RoundRobin, Scripted, is_situation_fair, simulate
from .pep import parse_bad, parse_pep
from .protect import HeightMode, dheight_order, mindoo_extensions
from .report import (
    SCHEMA_VERSION,
    STATUS_HEADER,
    Analysis,
    attractor_section,
    bad_section,
    config_json,
    dumps,
    full_report,
    graph_section,
    marking_json,
    net_section,
    protect_rows,
    render_figures,
    status_section,
    status_table_rows,
    write_table,
)
from .unfold import CutoffPolicy, ErvTotalOrder, SubsetOrder, enumerate_configurations, unfold

ORACLE_MISMATCH = 3


def load_net(spec: str):
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.FIXTURES:
            raise InputError(f"unknown built-in net {name!r}; pick one of {sorted(fixtures.FIXTURES)}")
        make, bad = fixtures.FIXTURES[name]
        net = make()
        return net, frozenset(net.marking(b) for b in bad)
    try:
        text = Path(spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror}") from None
    return parse_pep(text), frozenset()


def load_bad(path: Optional[str], net, default):
    if path is None:
        return default
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_bad(text, net)


def _header(command: str, a: Analysis) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "net": net_section(a)}


# -- commands --------------------------------------------------------------------

def cmd_reach(a: Analysis, args, out):
    rep = _header("reach", a) | {"graph": graph_section(a)}
    net, g = a.net, a.graph
    print(f"{len(g.nodes)} reachable markings, {len(g.edges)} edges, {len(g.sccs)} SCCs", file=out)
    for s, t, d in g.edges:
        print(f"  {net.format_marking(g.nodes[s])} -{net.transitions[t]}-> {net.format_marking(g.nodes[d])}",
              file=out)
    return rep, 0


def cmd_attractors(a: Analysis, args, out):
    sec = attractor_section(a)
    for att in sec["attractors"]:
        ms = ", ".join("{" + ",".join(m) + "}" for m in att["markings"])
        kind = "fixed point" if att["fixed_point"] else "cyclic"
        print(f"attractor [{ms}] ({kind}); basin of {len(att['basin'])} markings", file=out)
    print(f"net distance K_N = {sec['net_distance']}", file=out)
    return _header("attractors", a) | sec, 0


def _print_status(sec, out, with_oracle):
    for row in sec["markings"]:
        extra = f"  oracle={row['oracle']}" if with_oracle else ""
        print(f"  {{{','.join(row['marking'])}}}: {row['status']}{extra}", file=out)
    print("counts: " + ", ".join(f"{k}={v}" for k, v in sec["counts"].items()), file=out)
    if with_oracle:
        print(f"oracle diffs: {sec['oracle_diffs']}", file=out)


def cmd_classify(a: Analysis, args, out):
    sec = status_section(a, args.oracle)
    _print_status(sec, out, args.oracle)
    rep = _header("classify", a) | {"bad": bad_section(a), "classification": sec}
    return rep, ORACLE_MISMATCH if args.oracle and sec["oracle_diffs"] else 0


def cmd_mindoo(a: Analysis, args, out):
    rep = full_report(a, "mindoo", args.oracle)
    print(f"{len(rep['mindoo'])} minimally doomed configurations:", file=out)
    for c in rep["mindoo"]:
        print("  {" + ",".join(c) + "}", file=out)
    print("ridges: " + " ".join("{" + ",".join(r) + "}" for r in rep["ridges"]), file=out)
    print(f"freeness checks: {rep['freeness_checks']}", file=out)
    code = 0
    if args.oracle:
        o = rep["oracle"]
        bad_rows = rep["classification"]["oracle_diffs"]
        print(f"oracle: {o['mindoo_diffs']} mindoo diffs, {bad_rows} classification diffs, "
              f"ridges witnessed={o['ridges_witnessed']}", file=out)
        if o["mindoo_diffs"] or bad_rows or not o["ridges_witnessed"]:
            code = ORACLE_MISMATCH
    return rep, code


def cmd_protect(a: Analysis, args, out):
    mode = HeightMode(args.mode)
    rep = _header("protect", a) | {"mode": mode.value}
    if args.all_markings:
        rows = protect_rows(a, mode)
        for r in rows:
            print(f"  {{{','.join(r['marking'])}}} via {{{','.join(r['configuration'])}}}: "
                  f"{r['status']}, P={r['protectedness']}", file=out)
        rep["protectedness"] = rows
        return rep, 0
    names = [n.strip() for n in (args.config or "").split(",") if n.strip()]
    pf = a.prefix
    c = pf.configuration_by_names(names)
    status = a.status_of(pf.mark_of(c.events))
    p = a.protectedness_of(c, mode)
    exts = mindoo_extensions(pf, c, a.mindoo, a.spec, status)
    print(f"configuration {{{','.join(config_json(pf, c.events))}}} marks "
          f"{a.net.format_marking(pf.mark_of(c.events))}: {status}, P={p}", file=out)
    rep |= {
        "configuration": config_json(pf, c.events),
        "marking": marking_json(a.net, pf.mark_of(c.events)),
        "status": str(status),
        "protectedness": str(p),
        "mindoo_extensions": sorted(config_json(pf, x.events) for x in exts),
    }
    return rep, 0


def _policy(text: str, net):
    if text == "round-robin":
        return RoundRobin()
    if text.startswith("script:"):
        word = [w for w in text[len("script:"):].split(",") if w]
        return Scripted(tuple(net.transition_id(w) for w in word))
    raise InputError(f"unknown policy {text!r}")


def cmd_simulate(a: Analysis, args, out):
    net = a.net
    trace = simulate(net, _policy(args.policy, net), args.max_steps, a.graph)
    try:
        fair = is_situation_fair(trace)
    except NotDecidable:
        fair = None
    entered = None
    if trace.entered_attractor is not None:
        att, idx = trace.entered_attractor
        entered = {"markings": sorted(marking_json(net, a.graph.nodes[v]) for v in att.markings),
                   "entry_index": idx}
    counts = Counter(net.transitions[t] for t in trace.fired())
    rep = _header("simulate", a) | {
        "policy": args.policy,
        "steps": len(trace.steps),
        "terminal_marking": marking_json(net, trace.terminal_marking),
        "deadlocked": trace.deadlocked,
        "entered_attractor": entered,
        "situation_fair": fair,
        "fired": dict(sorted(counts.items())),
    }
    print(f"{len(trace.steps)} steps, ends at {net.format_marking(trace.terminal_marking)}", file=out)
    print(f"entered attractor: {entered['markings'] if entered else 'none'}"
          + (f" at step {entered['entry_index']}" if entered else ""), file=out)
    print("situation fair: " + ("undecidable (no lasso)" if fair is None else str(fair).lower()), file=out)
    return rep, 0


def _order(name: str):
    return {"erv": ErvTotalOrder, "subset": SubsetOrder}.get(name, dheight_order)()


def cmd_unfold(a: Analysis, args, out):
    net = a.net
    order = _order(args.order)
    bad = a.spec.closed_markings
    policy = CutoffPolicy(extra_bad_cutoff=args.bad_cutoff,
                          loop_subset_mode=isinstance(order, SubsetOrder),
                          is_bad=(lambda m: m in bad) if args.bad_cutoff else None)
    pf = unfold(net, None, order, policy, max_events=args.max_events)
    events = []
    for e, ev in enumerate(pf.events):
        events.append({"name": pf.event_name(e), "cutoff": ev.cutoff, "reason": ev.cutoff_reason,
                       "cone": config_json(pf, pf.cones[e])})
        flag = f"  cutoff ({ev.cutoff_reason})" if ev.cutoff else ""
        print(f"  {pf.event_name(e)}  mark {net.format_marking(pf.mark_of(pf.cones[e]))}{flag}", file=out)
    marks = {pf.mark_of(c.events) for c in enumerate_configurations(pf, a.cap)}
    print(f"{len(pf.events)} events, {len(pf.cutoffs())} cutoffs, "
          f"{len(marks)}/{len(a.graph.nodes)} markings represented", file=out)
    rep = _header("unfold", a) | {
        "order": args.order,
        "events": events,
        "cutoffs": len(pf.cutoffs()),
        "markings_represented": len(marks),
    }
    return rep, 0


def cmd_export(a: Analysis, args, out):
    if args.dot == "graph":
        status = {n: s for n, s in enumerate(a.status)} if a.spec.raw else None
        text = graph_to_dot(a.graph, status)
    else:
        order = _order(args.order)
        policy = CutoffPolicy(loop_subset_mode=isinstance(order, SubsetOrder))
        text = prefix_to_dot(unfold(a.net, None, order, policy, max_events=args.max_events))
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return None, 0


COMMANDS = {
    "reach": (cmd_reach, "reachability graph statistics"),
    "attractors": (cmd_attractors, "attractors, basins and K_N"),
    "classify": (cmd_classify, "bad/doomed/free status of every reachable marking"),
    "mindoo": (cmd_mindoo, "minimally doomed configurations, cliff-edges and ridges"),
    "protect": (cmd_protect, "protectedness of a configuration or of every marking"),
    "simulate": (cmd_simulate, "fire a policy and check attractor entry and fairness"),
    "unfold": (cmd_unfold, "build a complete finite prefix"),
    "export": (cmd_export, "Graphviz DOT of the graph or a prefix"),
}
NEEDS_BAD = {"classify", "mindoo", "protect"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("net", help="PEP ll_net file or builtin:<name>")
    common.add_argument("--json", metavar="PATH", help="write the JSON report ('-' for stdout)")
    common.add_argument("--oracle", action="store_true", help="cross-check against the explicit-state oracle")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--figures", metavar="DIR", help="render matplotlib figures into DIR")
    common.add_argument("--table", metavar="PATH", help="write the per-marking status table (.csv or .tsv)")
    common.add_argument("--max-events", type=int, default=10_000)
    common.add_argument("--max-states", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cliffedge", description="Long-run fate analysis of safe Petri nets.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in NEEDS_BAD or name in ("unfold", "export"):
            p.add_argument("bad", nargs="?", help="bad-markings file")
        if name == "protect":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--config", help="comma-separated event names, e.g. alpha#1,gamma#1")
            g.add_argument("--all-markings", action="store_true")
            p.add_argument("--mode", choices=[m.value for m in HeightMode], default="opponent")
        if name == "simulate":
            p.add_argument("--policy", default="round-robin", help="round-robin or script:t1,t2,...")
            p.add_argument("--max-steps", type=int, default=10_000)
        if name in ("unfold", "export"):
            p.add_argument("--order", choices=["erv", "subset", "dheight"], default="erv")
        if name == "unfold":
            p.add_argument("--bad-cutoff", action="store_true", help="also cut events reaching bad markings")
        if name == "export":
            p.add_argument("--dot", choices=["graph", "prefix"], required=True)
            p.add_argument("-o", "--output", metavar="PATH")
    return parser


def run_command(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        net, default_bad = load_net(args.net)
        raw_bad = load_bad(getattr(args, "bad", None), net, default_bad)
        if args.command in NEEDS_BAD and getattr(args, "bad", None) is None and not args.net.startswith("builtin:"):
            raise InputError(f"{args.command} needs a bad-markings file")
        a = Analysis(net, raw_bad, max_events=args.max_events, max_states=args.max_states)
        fn, _ = COMMANDS[args.command]
        # stdout JSON stays machine-readable: the text summary is dropped
        summary = io.StringIO() if args.json == "-" else out
        rep, code = fn(a, args, summary)
        if args.table:
            write_table(args.table, STATUS_HEADER, status_table_rows(a))
        if args.figures:
            for path in render_figures(a, args.figures, with_protect=args.command in NEEDS_BAD):
                print(f"wrote {path}", file=summary)
        if rep is not None and args.json:
            if args.timings:
                rep["timings"] = {k: round(v, 6) for k, v in sorted(a.timings.items())}
            text = dumps(rep)
            if args.json == "-":
                out.write(text)
            else:
                Path(args.json).write_text(text)
        return code
    except CliffedgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)


def main() -> None:
    sys.exit(run_command())

"""Command line front end.

Exit codes: 0 for success (or an equivalence verdict of yes), 1 for a
negative verdict or a correspondence violation, 2 for usage, parse, or
bound errors.  Diagnostics go to stderr; results go to stdout, as JSON
when --json is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import bpi as bp
from . import equivalence as eq
from . import lts as L
from . import systems
from .predicates import DomainContext, EMPTY_DOMAINS
from .semantics import OUT, system_in_step, system_out_steps
from .syntax import (
    ParseError,
    parse_abc,
    parse_bpi,
    pretty_bpi,
    pretty_component,
    pretty_label,
    pretty_model,
    pretty_pred,
)
from .terms import canonical

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Validated command configuration."""

    universe_mode: str = "auto"  # auto | declared | none
    max_states: int = 100_000
    max_depth: int = 1_000
    jobs: int = 1
    strict: bool = False
    json_out: str = None  # None, "-" for stdout, or a path

    @property
    def bounds(self) -> L.ExploreBounds:
        return L.ExploreBounds(self.max_states, self.max_depth)


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _config(args) -> RunConfig:
    cfg = RunConfig(
        universe_mode=getattr(args, "universe", "auto"),
        max_states=getattr(args, "max_states", None)
        or int(os.environ.get("ABCALC_MAX_STATES", 100_000)),
        max_depth=getattr(args, "max_depth", None)
        or int(os.environ.get("ABCALC_MAX_DEPTH", 1_000)),
        jobs=getattr(args, "jobs", 1),
        strict=getattr(args, "strict", False),
        json_out=getattr(args, "json", None),
    )
    if cfg.max_states <= 0 or cfg.max_depth <= 0 or cfg.jobs <= 0:
        raise CliError("bounds and --jobs must be positive")
    return cfg


def _load_model(path: str):
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")
    try:
        if path.endswith(".bpi"):
            return parse_bpi(text)
        return parse_abc(text)
    except ParseError as exc:
        raise CliError(f"{path}:{exc}")


def _require_component(model, path):
    if model.component is None:
        raise CliError(f"{path}: no system component (add a comp block or system:)")
    return model.component


def _universe(model, comp, cfg: RunConfig):
    declared = model.universe
    if cfg.universe_mode == "none":
        return L.EMPTY_UNIVERSE
    if cfg.universe_mode == "declared":
        return declared
    return L.auto_universe(comp, model.defs, cfg.bounds, model.domains, base=declared)


def _merge_contexts(m1, m2):
    defs = dict(m1.defs)
    for name, entry in m2.defs.items():
        if name in defs and defs[name] != entry:
            raise CliError(f"definition {name!r} differs between the two files")
        defs[name] = entry
    d1, d2 = dict(m1.domains.items), dict(m2.domains.items)
    for attr, vals in d2.items():
        if attr in d1 and d1[attr] != vals:
            raise CliError(f"domain of {attr!r} differs between the two files")
        d1[attr] = vals
    return defs, DomainContext.of({a: set(v) for a, v in d1.items()})


def _emit(cfg: RunConfig, payload: dict, human: str):
    if cfg.json_out is not None:
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        text = json.dumps(payload, indent=2, sort_keys=True)
        if cfg.json_out == "-":
            print(text)
        else:
            with open(cfg.json_out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            if human:
                print(human)
    elif human:
        print(human)


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args) -> int:
    cfg = _config(args)
    model = _load_model(args.file)
    if args.file.endswith(".bpi"):
        _emit(cfg, {"term": pretty_bpi(model)}, pretty_bpi(model))
        return 0
    text = pretty_model(model)
    _emit(cfg, {"model": text}, text.rstrip("\n"))
    return 0


def cmd_steps(args) -> int:
    cfg = _config(args)
    model = _load_model(args.file)
    if args.file.endswith(".bpi"):
        universe = bp.harvest_bpi_universe(model, cfg.max_states)
        rows = [
            {"label": _bpi_label_text(lab), "target": pretty_bpi(nxt)}
            for lab, nxt in bp.bpi_steps(model, universe)
        ]
    else:
        comp = canonical(_require_component(model, args.file))
        universe = _universe(model, comp, cfg)
        steps = list(system_out_steps(comp, model.defs, cfg.strict))
        for msg in universe.labels:
            steps.extend((msg, c2) for c2 in system_in_step(comp, msg, model.defs))
        rows = [
            {"label": pretty_label(lab), "target": pretty_component(canonical(c2))}
            for lab, c2 in steps
        ]
        rows.sort(key=lambda r: (r["label"], r["target"]))
    human = "\n".join(f"{r['label']}  ->  {r['target']}" for r in rows) or "(no steps)"
    _emit(cfg, {"steps": rows}, human)
    return 0


def _bpi_label_text(lab) -> str:
    if lab == bp.TAU:
        return "tau"
    kind, chan, values = lab
    mark = "!" if kind == "out" else "?"
    return f"{chan}{mark}({', '.join(values)})"


def cmd_explore(args) -> int:
    cfg = _config(args)
    model = _load_model(args.file)
    comp = _require_component(model, args.file)
    universe = _universe(model, comp, cfg)
    lts = L.explore(comp, model.defs, universe, cfg.bounds, model.domains, cfg.strict)
    text = L.aut_text(lts)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        human = f"wrote {args.output}: {len(lts.states)} states, {len(lts.transitions)} transitions"
    else:
        human = text.rstrip("\n")
    _emit(
        cfg,
        {
            "states": len(lts.states),
            "transitions": len(lts.transitions),
            "universe_fingerprint": universe.fingerprint(),
            "output": args.output,
        },
        human,
    )
    return 0


def cmd_barbs(args) -> int:
    cfg = _config(args)
    model = _load_model(args.file)
    comp = _require_component(model, args.file)
    preds = eq.barbs(comp, model.defs, model.domains, weak=args.weak, bounds=cfg.bounds)
    texts = sorted(pretty_pred(p) for p in preds)
    _emit(cfg, {"barbs": texts, "weak": args.weak}, "\n".join(texts) or "(none)")
    return 0


def cmd_check_bisim(args) -> int:
    cfg = _config(args)
    m1, m2 = _load_model(args.left), _load_model(args.right)
    c1 = _require_component(m1, args.left)
    c2 = _require_component(m2, args.right)
    defs, domains = _merge_contexts(m1, m2)
    universe = None
    if cfg.universe_mode != "auto":
        u1 = _universe(m1, c1, cfg)
        u2 = _universe(m2, c2, cfg)
        universe = u1.merged(u2, domains)
    check = eq.strong_bisim if args.strong else eq.weak_bisim
    verdict = check(c1, c2, defs, universe, domains, cfg.bounds)
    lines = [
        ("equivalent" if verdict.equivalent else "not equivalent")
        + (" (inconclusive: bounds hit)" if verdict.inconclusive else ""),
        f"universe: {len(verdict.universe.labels)} labels, fingerprint {verdict.universe.fingerprint()}",
    ]
    if verdict.witness:
        lines.append("witness:")
        lines.extend(f"  [{s['from']}] {s['label']}" for s in verdict.witness)
    if verdict.reason:
        print(verdict.reason, file=sys.stderr)
    _emit(cfg, {"mode": "strong" if args.strong else "weak", **verdict.as_dict()},
          "\n".join(lines))
    if verdict.inconclusive:
        return 2
    return 0 if verdict.equivalent else 1


def cmd_translate(args) -> int:
    cfg = _config(args)
    term = _load_model(args.file)
    if not args.file.endswith(".bpi"):
        raise CliError("translate expects a .bpi file")
    comp, defs = bp.encode(term)
    from .syntax import Model

    model = Model(component=comp, defs=defs)
    text = pretty_model(model)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        human = f"wrote {args.output}"
    else:
        human = text.rstrip("\n")
    _emit(cfg, {"model": text, "output": args.output}, human)
    return 0


def cmd_verify_encoding(args) -> int:
    cfg = _config(args)
    term = _load_model(args.file)
    if not args.file.endswith(".bpi"):
        raise CliError("verify-encoding expects a .bpi file")
    report = bp.correspondence_check(term, max_states=cfg.max_states)
    human = (
        f"{'ok' if report.ok else 'VIOLATION'}: {report.states_checked} states, "
        f"{report.transitions_checked} transitions checked, universe {len(report.universe)}"
    )
    if not report.ok:
        for v in report.violations[:10]:
            print(f"violation: {v}", file=sys.stderr)
    _emit(
        cfg,
        {
            "ok": report.ok,
            "states_checked": report.states_checked,
            "transitions_checked": report.transitions_checked,
            "violations": [repr(v) for v in report.violations],
        },
        human,
    )
    return 0 if report.ok else 1


def cmd_corpus(args) -> int:
    cfg = _config(args)
    results = []

    def check(name, ok):
        results.append((name, bool(ok)))
        print(f"{'ok  ' if ok else 'FAIL'} {name}")

    net = systems.network()
    lts = L.explore(net["N"], net["defs"], L.EMPTY_UNIVERSE, cfg.bounds, net["domains"])
    pi1 = net["pi1"]
    check("network explores", len(lts.states) == 10)
    check("network first emission is a client barb",
          any(eq.label_equiv_pred(lab, pi1, net["domains"])
              for _, lab, _ in lts.transitions if lab.kind == OUT))
    v1 = eq.weak_bisim(net["N_closed"], net["T"], net["defs"], domains=net["domains"],
                       bounds=cfg.bounds)
    check("closed network matches the three-shot test", v1.equivalent)
    v2 = eq.weak_bisim(net["N_CP2"], net["T_CP2"], net["defs"], domains=net["domains"],
                       bounds=cfg.bounds)
    check("interference distinguishes the systems", not v2.equivalent)
    check("witness carries the interfering id",
          v2.witness is not None and any("f3" in s["label"] for s in v2.witness))
    for name in ("handshake.bpi", "relay.bpi", "repeater.bpi"):
        term = parse_bpi(systems.corpus_path(name).read_text())
        rep = bp.correspondence_check(term, max_states=cfg.max_states)
        check(f"encoding correspondence: {name}", rep.ok)
    failed = [n for n, ok in results if not ok]
    _emit(cfg, {"results": [{"name": n, "ok": ok} for n, ok in results]}, "")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="abcalc",
        description="Workbench for attribute-based communicating components.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, universe=True):
        p.add_argument("--json", nargs="?", const="-", default=None, metavar="FILE",
                       help="emit a JSON verdict (to FILE, or stdout)")
        p.add_argument("--max-states", type=int, default=None)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1,
                       help="exploration parallelism (results are identical for any value)")
        p.add_argument("--strict", action="store_true",
                       help="fail on expression evaluation errors instead of pruning")
        if universe:
            p.add_argument("--universe", choices=("auto", "declared", "none"),
                           default="auto")

    p = sub.add_parser("parse", help="parse and pretty-print a source file")
    p.add_argument("file")
    common(p, universe=False)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("steps", help="one-step successors with labels")
    p.add_argument("file")
    common(p)
    p.set_defaults(fn=cmd_steps)

    p = sub.add_parser("explore", help="explore to a .aut transition system")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    common(p)
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("barbs", help="observable output predicates")
    p.add_argument("file")
    p.add_argument("--weak", action="store_true")
    common(p, universe=False)
    p.set_defaults(fn=cmd_barbs)

    p = sub.add_parser("check-bisim", help="decide bisimilarity of two systems")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--strong", action="store_true")
    mode.add_argument("--weak", action="store_true")
    p.add_argument("left")
    p.add_argument("right")
    common(p)
    p.set_defaults(fn=cmd_check_bisim)

    p = sub.add_parser("translate", help="translate a broadcast term")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    common(p, universe=False)
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("verify-encoding", help="check the translation step by step")
    p.add_argument("file")
    common(p, universe=False)
    p.set_defaults(fn=cmd_verify_encoding)

    p = sub.add_parser("corpus", help="run the bundled regression suite")
    common(p, universe=False)
    p.set_defaults(fn=cmd_corpus)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except L.BoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (bp.EncodingError, bp.UnboundRecursionVariable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

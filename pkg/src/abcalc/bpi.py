"""Broadcast channel calculus: syntax, CBS-style broadcast transitions,
the structured-message encoding into attribute-based components, and the
step-by-step correspondence checker for that encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import predicates as pr
from . import semantics as sem
from .terms import (
    AttrEnv,
    Call,
    Choice,
    Component,
    Const,
    In,
    Inact,
    Leaf,
    Out,
    ParC,
    Var,
    canonical,
)

# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True)
class BNil:
    pass


@dataclass(frozen=True)
class BTau:
    cont: "BpiProcess"


@dataclass(frozen=True)
class BIn:
    chan: str
    vars: tuple
    cont: "BpiProcess"


@dataclass(frozen=True)
class BOut:
    chan: str
    names: tuple
    cont: "BpiProcess"


@dataclass(frozen=True)
class BSum:
    left: "BpiProcess"
    right: "BpiProcess"


@dataclass(frozen=True)
class BRec:
    name: str
    params: tuple
    body: "BpiProcess"
    args: tuple


@dataclass(frozen=True)
class BCall:
    name: str
    args: tuple


@dataclass(frozen=True)
class BPar:
    left: "BpiProcess"
    right: "BpiProcess"


BpiProcess = object

BNIL = BNil()


class UnboundRecursionVariable(Exception):
    pass


class EncodingError(Exception):
    pass


class NonInjectiveChannelMap(EncodingError):
    pass


class CorrespondenceViolation(Exception):
    pass


# ---------------------------------------------------------------------------
# Free names / substitution (names double as channels and values)


def free_names(p: BpiProcess, bound: frozenset = frozenset()) -> frozenset:
    if isinstance(p, BNil):
        return frozenset()
    if isinstance(p, BTau):
        return free_names(p.cont, bound)
    if isinstance(p, BIn):
        chan = frozenset() if p.chan in bound else frozenset({p.chan})
        return chan | free_names(p.cont, bound | frozenset(p.vars))
    if isinstance(p, BOut):
        names = frozenset(n for n in (p.chan, *p.names) if n not in bound)
        return names | free_names(p.cont, bound)
    if isinstance(p, (BSum, BPar)):
        return free_names(p.left, bound) | free_names(p.right, bound)
    if isinstance(p, BRec):
        args = frozenset(a for a in p.args if a not in bound)
        return args | free_names(p.body, bound | frozenset(p.params))
    if isinstance(p, BCall):
        return frozenset(a for a in p.args if a not in bound)
    raise TypeError(f"not a bpi process: {p!r}")


def _fresh_like(name: str, avoid) -> str:
    i = 0
    while f"{name}#{i}" in avoid:
        i += 1
    return f"{name}#{i}"


def subst_names(p: BpiProcess, mapping: dict) -> BpiProcess:
    """Capture-avoiding substitution of names for names."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return p
    look = lambda n: mapping.get(n, n)
    if isinstance(p, BNil):
        return p
    if isinstance(p, BTau):
        return BTau(subst_names(p.cont, mapping))
    if isinstance(p, BIn):
        vars_, cont = _avoid_capture(p.vars, p.cont, mapping)
        inner = {k: v for k, v in mapping.items() if k not in vars_}
        return BIn(look(p.chan), vars_, subst_names(cont, inner))
    if isinstance(p, BOut):
        return BOut(look(p.chan), tuple(look(n) for n in p.names), subst_names(p.cont, mapping))
    if isinstance(p, BSum):
        return BSum(subst_names(p.left, mapping), subst_names(p.right, mapping))
    if isinstance(p, BPar):
        return BPar(subst_names(p.left, mapping), subst_names(p.right, mapping))
    if isinstance(p, BRec):
        params, body = _avoid_capture(p.params, p.body, mapping)
        inner = {k: v for k, v in mapping.items() if k not in params}
        return BRec(p.name, params, subst_names(body, inner), tuple(look(a) for a in p.args))
    if isinstance(p, BCall):
        return BCall(p.name, tuple(look(a) for a in p.args))
    raise TypeError(f"not a bpi process: {p!r}")


def _avoid_capture(binders: tuple, body: BpiProcess, mapping: dict):
    live = {k for k in mapping if k not in binders}
    incoming = {mapping[k] for k in live}
    clashing = [b for b in binders if b in incoming]
    if not clashing:
        return binders, body
    avoid = set(incoming) | set(binders) | set(free_names(body))
    ren = {}
    for b in clashing:
        nb = _fresh_like(b, avoid)
        avoid.add(nb)
        ren[b] = nb
    new_binders = tuple(ren.get(b, b) for b in binders)
    return new_binders, subst_names(body, ren)


def canon_bpi(p: BpiProcess, ren=None, counter: int = 0):
    """Rename binders positionally so structural equality is alpha-blind."""
    if ren is None:
        out, _ = canon_bpi(p, {}, 0)
        return out
    look = lambda n: ren.get(n, n)
    if isinstance(p, BNil):
        return p, counter
    if isinstance(p, BTau):
        cont, counter = canon_bpi(p.cont, ren, counter)
        return BTau(cont), counter
    if isinstance(p, BIn):
        fresh = tuple(f"x{counter + i}" for i in range(len(p.vars)))
        counter += len(p.vars)
        inner = dict(ren)
        inner.update(zip(p.vars, fresh))
        cont, counter = canon_bpi(p.cont, inner, counter)
        return BIn(look(p.chan), fresh, cont), counter
    if isinstance(p, BOut):
        cont, counter = canon_bpi(p.cont, ren, counter)
        return BOut(look(p.chan), tuple(look(n) for n in p.names), cont), counter
    if isinstance(p, BSum):
        left, counter = canon_bpi(p.left, ren, counter)
        right, counter = canon_bpi(p.right, ren, counter)
        return BSum(left, right), counter
    if isinstance(p, BPar):
        left, counter = canon_bpi(p.left, ren, counter)
        right, counter = canon_bpi(p.right, ren, counter)
        return BPar(left, right), counter
    if isinstance(p, BRec):
        # rec bodies are closed under their parameters, so they get a
        # local numbering: identical recs canonicalize identically in
        # any context
        fresh = tuple(f"x{i}" for i in range(len(p.params)))
        body, _ = canon_bpi(p.body, dict(zip(p.params, fresh)), len(p.params))
        return BRec(p.name, fresh, body, tuple(look(a) for a in p.args)), counter
    if isinstance(p, BCall):
        return BCall(p.name, tuple(look(a) for a in p.args)), counter
    raise TypeError(f"not a bpi process: {p!r}")


# ---------------------------------------------------------------------------
# Broadcast transitions

TAU = ("tau",)


def _unfold(rec: BRec) -> BpiProcess:
    body = subst_names(rec.body, dict(zip(rec.params, rec.args)))
    return _tie(body, rec)


def _tie(p: BpiProcess, rec: BRec) -> BpiProcess:
    """Replace recursion-variable calls by the recursive definition."""
    if isinstance(p, BNil):
        return p
    if isinstance(p, BTau):
        return BTau(_tie(p.cont, rec))
    if isinstance(p, BIn):
        return BIn(p.chan, p.vars, _tie(p.cont, rec))
    if isinstance(p, BOut):
        return BOut(p.chan, p.names, _tie(p.cont, rec))
    if isinstance(p, BSum):
        return BSum(_tie(p.left, rec), _tie(p.right, rec))
    if isinstance(p, BPar):
        return BPar(_tie(p.left, rec), _tie(p.right, rec))
    if isinstance(p, BRec):
        if p.name == rec.name:
            return p  # inner rec shadows the name
        return BRec(p.name, p.params, _tie(p.body, rec), p.args)
    if isinstance(p, BCall):
        if p.name == rec.name:
            return BRec(rec.name, rec.params, rec.body, p.args)
        return p
    raise TypeError(f"not a bpi process: {p!r}")


def _seq_outs(g: BpiProcess):
    """(label, successor) pairs for tau and output prefixes of a
    sequential term, through choice and recursion unfolding."""
    if isinstance(g, (BNil, BIn)):
        return
    elif isinstance(g, BTau):
        yield TAU, g.cont
    elif isinstance(g, BOut):
        yield ("out", g.chan, g.names), g.cont
    elif isinstance(g, BSum):
        yield from _seq_outs(g.left)
        yield from _seq_outs(g.right)
    elif isinstance(g, BRec):
        yield from _seq_outs(_unfold(g))
    elif isinstance(g, BCall):
        raise UnboundRecursionVariable(g.name)
    else:
        raise TypeError(f"not a sequential bpi term: {g!r}")


def _seq_ins(g: BpiProcess, chan: str, values: tuple):
    """(accepting successors, can_discard) for a broadcast chan(values)."""
    if isinstance(g, (BNil, BTau, BOut)):
        return [], True
    if isinstance(g, BIn):
        if g.chan != chan or len(g.vars) != len(values):
            return [], True
        return [subst_names(g.cont, dict(zip(g.vars, values)))], False
    if isinstance(g, BSum):
        al, dl = _seq_ins(g.left, chan, values)
        ar, dr = _seq_ins(g.right, chan, values)
        return al + ar, dl and dr
    if isinstance(g, BRec):
        return _seq_ins(_unfold(g), chan, values)
    if isinstance(g, BCall):
        raise UnboundRecursionVariable(g.name)
    raise TypeError(f"not a sequential bpi term: {g!r}")


def _par_ins(p: BpiProcess, chan: str, values: tuple):
    if isinstance(p, BPar):
        return [
            BPar(l2, r2)
            for l2 in _par_ins(p.left, chan, values)
            for r2 in _par_ins(p.right, chan, values)
        ]
    accepts, can_discard = _seq_ins(p, chan, values)
    if can_discard:
        accepts = accepts + [p]
    return accepts


def _par_outs(p: BpiProcess):
    if not isinstance(p, BPar):
        yield from _seq_outs(p)
        return
    for label, l2 in _par_outs(p.left):
        if label == TAU:
            yield label, BPar(l2, p.right)
        else:
            _, chan, values = label
            for r2 in _par_ins(p.right, chan, values):
                yield label, BPar(l2, r2)
    for label, r2 in _par_outs(p.right):
        if label == TAU:
            yield label, BPar(p.left, r2)
        else:
            _, chan, values = label
            for l2 in _par_ins(p.left, chan, values):
                yield label, BPar(l2, r2)


def bpi_steps(p: BpiProcess, universe=()):
    """All transitions of a closed term: autonomous tau/output moves plus,
    for every (chan, values) in the universe, the broadcast-input moves."""
    steps = list(_par_outs(p))
    for chan, values in universe:
        for p2 in _par_ins(p, chan, tuple(values)):
            steps.append((("in", chan, tuple(values)), p2))
    return steps


def bpi_barbs(p: BpiProcess) -> frozenset:
    return frozenset(lab[1] for lab, _ in _par_outs(p) if lab != TAU)


# ---------------------------------------------------------------------------
# Encoding into attribute-based components


def _name_expr(name: str, bound: frozenset):
    return Var(name) if name in bound else Const(name)


def _names_in_proc(p) -> set:
    """All string constants and variable names in an encoded process."""
    from . import terms as t

    out = set()

    def walk_expr(e):
        if isinstance(e, Const) and isinstance(e.value, str):
            out.add(e.value)
        elif isinstance(e, Var):
            out.add(e.name)
        elif isinstance(e, t.Op):
            for a in e.args:
                walk_expr(a)

    def walk_pred(pred):
        for a in pr._atoms(pred):
            walk_expr(a.left)
            walk_expr(a.right)

    def walk(proc):
        if isinstance(proc, Inact):
            return
        if isinstance(proc, Out):
            for e in proc.exprs:
                walk_expr(e)
            walk_pred(proc.pred)
            walk(proc.cont)
        elif isinstance(proc, In):
            walk_pred(proc.pred)
            out.update(proc.vars)
            walk(proc.cont)
        elif isinstance(proc, (Choice,)):
            walk(proc.left)
            walk(proc.right)
        elif isinstance(proc, Call):
            for e in proc.args:
                walk_expr(e)
        else:
            raise TypeError(f"unexpected node in encoded process: {proc!r}")

    walk(p)
    return out


def encode_proc(g: BpiProcess, bound: frozenset, defs: dict):
    if isinstance(g, BNil):
        return Inact()
    if isinstance(g, BTau):
        return Out((), pr.FF, encode_proc(g.cont, bound, defs))
    if isinstance(g, BOut):
        exprs = (_name_expr(g.chan, bound),) + tuple(_name_expr(n, bound) for n in g.names)
        return Out(exprs, pr.TT, encode_proc(g.cont, bound, defs))
    if isinstance(g, BIn):
        cont = encode_proc(g.cont, bound | frozenset(g.vars), defs)
        avoid = _names_in_proc(cont) | set(g.vars) | {g.chan}
        i = 0
        while f"_y{i}" in avoid:
            i += 1
        y = f"_y{i}"
        guard = pr.Atom("==", Var(y), _name_expr(g.chan, bound))
        return In(guard, (y,) + tuple(g.vars), cont)
    if isinstance(g, BSum):
        return Choice(encode_proc(g.left, bound, defs), encode_proc(g.right, bound, defs))
    if isinstance(g, BRec):
        body = encode_proc(g.body, frozenset(g.params), defs)
        entry = (tuple(g.params), body)
        if g.name in defs and defs[g.name] != entry:
            raise EncodingError(f"recursion name {g.name} reused with a different body")
        defs[g.name] = entry
        return Call(g.name, tuple(_name_expr(a, bound) for a in g.args))
    if isinstance(g, BCall):
        return Call(g.name, tuple(_name_expr(a, bound) for a in g.args))
    raise TypeError(f"not a sequential bpi term: {g!r}")


def encode(p: BpiProcess, channel_map=None):
    """Translate a closed broadcast term into a component (empty attribute
    environment and interface) plus the process definitions it needs."""
    if channel_map is not None:
        if len(set(channel_map.values())) != len(channel_map):
            raise NonInjectiveChannelMap("channel renaming must be injective")
        p = subst_names(p, dict(channel_map))
    defs: dict = {}
    comp = _encode_comp(p, defs)
    return comp, defs


def _encode_comp(p: BpiProcess, defs: dict) -> Component:
    if isinstance(p, BPar):
        return ParC(_encode_comp(p.left, defs), _encode_comp(p.right, defs))
    return Leaf(AttrEnv(), frozenset(), encode_proc(p, frozenset(), defs))


# ---------------------------------------------------------------------------
# Correspondence harness


@dataclass
class CorrespondenceReport:
    states_checked: int = 0
    transitions_checked: int = 0
    universe: tuple = ()
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def harvest_bpi_universe(p: BpiProcess, max_states: int = 2000, rounds: int = 6):
    """Fixpoint of the broadcast alphabet: explore, collect output labels,
    feed them back as inputs, repeat."""
    universe: set = set()
    for _ in range(rounds):
        seen = set()
        frontier = [canon_bpi(p)]
        harvested = set(universe)
        while frontier and len(seen) < max_states:
            cur = frontier.pop()
            if cur in seen:
                continue
            seen.add(cur)
            for lab, nxt in bpi_steps(cur, universe):
                if lab[0] == "out":
                    harvested.add((lab[1], tuple(lab[2])))
                nxt = canon_bpi(nxt)
                if nxt not in seen:
                    frontier.append(nxt)
        if harvested == universe:
            break
        universe = harvested
    return tuple(sorted(universe))


def _abc_label(lab) -> sem.Label:
    if lab == TAU:
        return sem.Label(sem.OUT, AttrEnv(), pr.FF, ())
    kind, chan, values = lab
    abc_kind = sem.OUT if kind == "out" else sem.IN
    return sem.Label(abc_kind, AttrEnv(), pr.TT, (chan,) + tuple(values))


def correspondence_check(p: BpiProcess, max_states: int = 2000) -> CorrespondenceReport:
    """Walk the broadcast transition system and, at every reachable state,
    require a label-preserving bijection between its transitions and the
    transitions of its translation, with matching barbs."""
    universe = harvest_bpi_universe(p, max_states)
    report = CorrespondenceReport(universe=universe)

    seen = set()
    frontier = [canon_bpi(p)]
    while frontier:
        if len(seen) >= max_states:
            report.violations.append(("bound-exceeded", len(seen)))
            break
        cur = frontier.pop()
        if cur in seen:
            continue
        seen.add(cur)
        report.states_checked += 1

        defs: dict = {}
        comp = canonical(_encode_comp(cur, defs))

        bsteps = [(lab, canon_bpi(nxt)) for lab, nxt in bpi_steps(cur, universe)]
        asteps = list(sem.system_out_steps(comp, defs))
        for chan, values in universe:
            msg = _abc_label(("in", chan, values))
            for c2 in sem.system_in_step(comp, msg, defs):
                asteps.append((msg, c2))
        asteps = [(lab, canonical(c2)) for lab, c2 in asteps]

        if len(bsteps) != len(asteps):
            report.violations.append(("transition-count", cur, len(bsteps), len(asteps)))

        # bijective matching per label, targets as multisets
        remaining = list(asteps)
        for lab, nxt in bsteps:
            want = (_abc_label(lab), canonical(_encode_comp(nxt, dict(defs))))
            if want in remaining:
                remaining.remove(want)
            else:
                report.violations.append(("unmatched-source-step", cur, lab))
        for extra in remaining:
            report.violations.append(("unmatched-target-step", cur, extra[0]))

        src_barbs = bpi_barbs(cur)
        tgt_barbs = frozenset(
            lab.values[0]
            for lab, _ in sem.system_out_steps(comp, defs)
            if isinstance(lab.pred, pr.Tt) and lab.values
        )
        if src_barbs != tgt_barbs:
            report.violations.append(("barb-mismatch", cur, src_barbs, tgt_barbs))

        report.transitions_checked += len(bsteps)
        for _, nxt in bsteps:
            if nxt not in seen:
                frontier.append(nxt)
    return report

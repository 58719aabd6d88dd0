"""The two transition relations: component-level steps of a single leaf
and system-level steps of a full component tree.

Output enumeration walks the process structure (Brd plus the choice /
interleave / awareness / recursion contexts).  Input handling returns,
for a leaf, the set of accepting successors together with whether the
discard derivation exists; a leaf whose input prefix satisfies both
receive constraints cannot discard, which is what keeps dynamic
operators honest.  At system level a broadcast from one side of a
parallel composition is delivered eagerly to every sibling, which either
accepts (possibly in several ways) or stays unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import predicates as pr
from .terms import (
    Aware,
    Call,
    Choice,
    Component,
    EvalError,
    In,
    Inact,
    Leaf,
    Out,
    ParC,
    ParP,
    Process,
    ResIn,
    ResOut,
    Upd,
    apply_updates,
    eval_expr,
    substitute,
)

OUT = "out"
IN = "in"


@dataclass(frozen=True)
class Label:
    kind: str  # OUT or IN
    env: "object"  # AttrEnv, already restricted to the sender interface
    pred: "object"  # closed Predicate
    values: tuple

    def as_input(self) -> "Label":
        return Label(IN, self.env, self.pred, self.values)


class UnboundProcessName(Exception):
    pass


def _resolve(call: Call, defs, env) -> Process:
    if call.name not in defs:
        raise UnboundProcessName(call.name)
    params, body = defs[call.name]
    if len(params) != len(call.args):
        from .terms import ArityMismatch

        raise ArityMismatch(f"{call.name} expects {len(params)} arguments")
    args = tuple(eval_expr(a, env) for a in call.args)
    return substitute(body, params, args)


# ---------------------------------------------------------------------------
# Component level


def component_out_steps(leaf: Leaf, defs, strict: bool = False):
    """All output transitions of a single leaf, as (Label, Leaf) pairs."""
    out = []
    for values, pred, succ in _proc_outs(leaf.env, leaf.iface, leaf.proc, defs, strict):
        label = Label(OUT, leaf.env.restrict(leaf.iface), pred, values)
        out.append((label, succ))
    return out


def _proc_outs(env, iface, proc, defs, strict):
    if isinstance(proc, (Inact, In, Upd)):
        return
    elif isinstance(proc, Out):
        try:
            values = tuple(eval_expr(e, env) for e in proc.exprs)
            pred = pr.close(proc.pred, env)
            succ = apply_updates(Leaf(env, iface, proc.cont))
        except EvalError:
            if strict:
                raise
            return
        yield values, pred, succ
    elif isinstance(proc, Aware):
        if _aware_holds(env, proc.pred):
            yield from _proc_outs(env, iface, proc.proc, defs, strict)
    elif isinstance(proc, Choice):
        yield from _proc_outs(env, iface, proc.left, defs, strict)
        yield from _proc_outs(env, iface, proc.right, defs, strict)
    elif isinstance(proc, ParP):
        for values, pred, succ in _proc_outs(env, iface, proc.left, defs, strict):
            yield values, pred, Leaf(succ.env, iface, ParP(succ.proc, proc.right))
        for values, pred, succ in _proc_outs(env, iface, proc.right, defs, strict):
            yield values, pred, Leaf(succ.env, iface, ParP(proc.left, succ.proc))
    elif isinstance(proc, Call):
        yield from _proc_outs(env, iface, _resolve(proc, defs, env), defs, strict)
    else:
        raise TypeError(f"not a process: {proc!r}")


def _aware_holds(env, pred) -> bool:
    try:
        return pr.satisfies(env, pr.close(pred, env))
    except EvalError:
        return False


def component_in_step(leaf: Leaf, msg: Label, defs):
    """Responses of a leaf to an input label.

    Returns (accepts, can_discard): the accepting successor leaves, and
    whether the discard derivation exists.  At least one of the two is
    always available.
    """
    accepts, can_discard = _proc_ins(leaf.env, leaf.iface, leaf.proc, msg, defs)
    return accepts, can_discard


def _proc_ins(env, iface, proc, msg, defs):
    if isinstance(proc, (Inact, Out, Upd)):
        return [], True
    if isinstance(proc, In):
        if len(proc.vars) != len(msg.values):
            return [], True
        if not pr.satisfies(env.restrict(iface), msg.pred):
            return [], True
        try:
            recv_pred = pr.close(pr.subst_pred(proc.pred, proc.vars, msg.values), env)
        except EvalError:
            return [], True
        if not pr.satisfies(msg.env, recv_pred):
            return [], True
        cont = substitute(proc.cont, proc.vars, msg.values)
        succ = apply_updates(Leaf(env, iface, cont))
        return [succ], False
    if isinstance(proc, Aware):
        if _aware_holds(env, proc.pred):
            return _proc_ins(env, iface, proc.proc, msg, defs)
        return [], True
    if isinstance(proc, Choice):
        al, dl = _proc_ins(env, iface, proc.left, msg, defs)
        ar, dr = _proc_ins(env, iface, proc.right, msg, defs)
        return al + ar, dl and dr
    if isinstance(proc, ParP):
        al, dl = _proc_ins(env, iface, proc.left, msg, defs)
        ar, dr = _proc_ins(env, iface, proc.right, msg, defs)
        accepts = [Leaf(s.env, iface, ParP(s.proc, proc.right)) for s in al]
        accepts += [Leaf(s.env, iface, ParP(proc.left, s.proc)) for s in ar]
        return accepts, dl and dr
    if isinstance(proc, Call):
        return _proc_ins(env, iface, _resolve(proc, defs, env), msg, defs)
    raise TypeError(f"not a process: {proc!r}")


# ---------------------------------------------------------------------------
# System level


def system_out_steps(c: Component, defs, strict: bool = False):
    """All system-level output transitions of a component tree."""
    out = []
    if isinstance(c, Leaf):
        out.extend(component_out_steps(c, defs, strict))
    elif isinstance(c, ParC):
        for label, l2 in system_out_steps(c.left, defs, strict):
            for r2 in system_in_step(c.right, label.as_input(), defs):
                out.append((label, ParC(l2, r2)))
        for label, r2 in system_out_steps(c.right, defs, strict):
            for l2 in system_in_step(c.left, label.as_input(), defs):
                out.append((label, ParC(l2, r2)))
    elif isinstance(c, ResOut):
        for label, c2 in system_out_steps(c.comp, defs, strict):
            extra = pr.instantiate(c.fn, label.env, label.values)
            strengthened = Label(OUT, label.env, pr.And(label.pred, extra), label.values)
            out.append((strengthened, ResOut(c2, c.fn)))
    elif isinstance(c, ResIn):
        for label, c2 in system_out_steps(c.comp, defs, strict):
            out.append((label, ResIn(c2, c.fn)))
    else:
        raise TypeError(f"not a component: {c!r}")
    return out


def system_in_step(c: Component, msg: Label, defs):
    """All successors after the environment injects an input label.

    Never empty: every component has at least the all-discard successor
    (itself) whenever no branch is forced to accept.
    """
    if isinstance(c, Leaf):
        accepts, can_discard = component_in_step(c, msg, defs)
        succs = list(accepts)
        if can_discard:
            succs.append(c)
        return succs
    if isinstance(c, ParC):
        return [
            ParC(l2, r2)
            for l2 in system_in_step(c.left, msg, defs)
            for r2 in system_in_step(c.right, msg, defs)
        ]
    if isinstance(c, ResIn):
        extra = pr.instantiate(c.fn, msg.env, msg.values)
        inner = Label(IN, msg.env, pr.And(msg.pred, extra), msg.values)
        return [ResIn(c2, c.fn) for c2 in system_in_step(c.comp, inner, defs)]
    if isinstance(c, ResOut):
        return [ResOut(c2, c.fn) for c2 in system_in_step(c.comp, msg, defs)]
    raise TypeError(f"not a component: {c!r}")

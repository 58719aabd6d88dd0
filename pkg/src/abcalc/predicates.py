"""Predicate language: satisfaction, closure, and a finite-witness solver
for satisfiability, implication and semantic equivalence.

The solver enumerates candidate environments built from the constants
occurring in the predicate, declared attribute domains, representative
integers around the mentioned constants, and one fresh name.  Candidate
environments are total on the mentioned attributes: satisfiability,
implication and equivalence quantify over total valuations, which is
what makes a != v equivalent to not (a = v).  This is complete for the
fixed atom catalogue (equality over structural values, integer order,
bounded set membership).
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Attr,
    AttrEnv,
    Const,
    EvalError,
    Expr,
    MsgIdx,
    Op,
    RestrictionFn,
    SelfAttr,
    SndAttr,
    UndefinedAttribute,
    Value,
    Var,
    eval_expr,
    subst_expr,
    value_key,
    values_equal,
)


@dataclass(frozen=True)
class Tt:
    pass


@dataclass(frozen=True)
class Ff:
    pass


@dataclass(frozen=True)
class Atom:
    op: str  # '==', '!=', '<', '<=', '>', '>=', 'in'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    pred: "Predicate"


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = object

TT = Tt()
FF = Ff()

ATOM_OPS = ("==", "!=", "<", "<=", ">", ">=", "in")
_ORDER_OPS = ("<", "<=", ">", ">=")


def conj(a: Predicate, b: Predicate) -> Predicate:
    if isinstance(a, Tt):
        return b
    if isinstance(b, Tt):
        return a
    return And(a, b)


def disj(a: Predicate, b: Predicate) -> Predicate:
    if isinstance(a, Ff):
        return b
    if isinstance(b, Ff):
        return a
    return Or(a, b)


# ---------------------------------------------------------------------------
# Satisfaction (two-valued: an atom whose operand fails to evaluate is
# unsatisfied, so a negation over it holds).


def _eval_atom(p: Atom, env: AttrEnv) -> bool:
    try:
        lv = eval_expr(p.left, env)
        rv = eval_expr(p.right, env)
    except EvalError:
        return False
    if p.op == "==":
        return values_equal(lv, rv)
    if p.op == "!=":
        return not values_equal(lv, rv)
    if p.op == "in":
        if isinstance(rv, frozenset):
            return any(values_equal(x, lv) for x in rv)
        if isinstance(rv, tuple):
            return any(values_equal(x, lv) for x in rv)
        return False
    # ordering applies only to (non-boolean) integers
    for v in (lv, rv):
        if isinstance(v, bool) or not isinstance(v, int):
            return False
    if p.op == "<":
        return lv < rv
    if p.op == "<=":
        return lv <= rv
    if p.op == ">":
        return lv > rv
    if p.op == ">=":
        return lv >= rv
    raise ValueError(f"unknown atom operator {p.op}")


def satisfies(env: AttrEnv, pred: Predicate) -> bool:
    if isinstance(pred, Tt):
        return True
    if isinstance(pred, Ff):
        return False
    if isinstance(pred, Atom):
        return _eval_atom(pred, env)
    if isinstance(pred, Not):
        return not satisfies(env, pred.pred)
    if isinstance(pred, And):
        return satisfies(env, pred.left) and satisfies(env, pred.right)
    if isinstance(pred, Or):
        return satisfies(env, pred.left) or satisfies(env, pred.right)
    raise TypeError(f"not a predicate: {pred!r}")


# ---------------------------------------------------------------------------
# Closure and substitution


def _close_expr(e: Expr, env: AttrEnv) -> Expr:
    if isinstance(e, SelfAttr):
        v = env.get(e.name)
        if v is None:
            raise UndefinedAttribute(e.name)
        return Const(v)
    if isinstance(e, Op):
        return Op(e.name, tuple(_close_expr(a, env) for a in e.args))
    return e


def close(pred: Predicate, env: AttrEnv) -> Predicate:
    """Replace every this.a by its value under env; bare attribute
    identifiers are left untouched."""
    if isinstance(pred, (Tt, Ff)):
        return pred
    if isinstance(pred, Atom):
        return Atom(pred.op, _close_expr(pred.left, env), _close_expr(pred.right, env))
    if isinstance(pred, Not):
        return Not(close(pred.pred, env))
    if isinstance(pred, And):
        return And(close(pred.left, env), close(pred.right, env))
    if isinstance(pred, Or):
        return Or(close(pred.left, env), close(pred.right, env))
    raise TypeError(f"not a predicate: {pred!r}")


def subst_pred(pred: Predicate, mapping_or_names, values=None) -> Predicate:
    """Textual simultaneous substitution of variables by values."""
    if values is not None:
        names = tuple(mapping_or_names)
        values = tuple(values)
        if len(names) != len(values):
            from .terms import ArityMismatch

            raise ArityMismatch(f"{len(names)} variables vs {len(values)} values")
        mapping = dict(zip(names, values))
    else:
        mapping = mapping_or_names
    if not mapping:
        return pred
    return _map_atoms(pred, lambda e: subst_expr(e, mapping))


def _map_atoms(pred: Predicate, f) -> Predicate:
    if isinstance(pred, (Tt, Ff)):
        return pred
    if isinstance(pred, Atom):
        return Atom(pred.op, f(pred.left), f(pred.right))
    if isinstance(pred, Not):
        return Not(_map_atoms(pred.pred, f))
    if isinstance(pred, And):
        return And(_map_atoms(pred.left, f), _map_atoms(pred.right, f))
    if isinstance(pred, Or):
        return Or(_map_atoms(pred.left, f), _map_atoms(pred.right, f))
    raise TypeError(f"not a predicate: {pred!r}")


def rename_pred_vars(pred: Predicate, ren: dict) -> Predicate:
    from .terms import _rename_expr

    return _map_atoms(pred, lambda e: _rename_expr(e, ren))


def pred_vars(pred: Predicate) -> frozenset:
    from .terms import expr_vars

    out = frozenset()
    for a in _atoms(pred):
        out |= expr_vars(a.left) | expr_vars(a.right)
    return out


def _atoms(pred: Predicate):
    if isinstance(pred, Atom):
        yield pred
    elif isinstance(pred, Not):
        yield from _atoms(pred.pred)
    elif isinstance(pred, (And, Or)):
        yield from _atoms(pred.left)
        yield from _atoms(pred.right)


def pred_attrs(pred: Predicate) -> frozenset:
    out = set()
    for a in _atoms(pred):
        out |= _expr_attrs(a.left) | _expr_attrs(a.right)
    return frozenset(out)


def _expr_attrs(e: Expr) -> set:
    if isinstance(e, Attr):
        return {e.name}
    if isinstance(e, Op):
        out = set()
        for a in e.args:
            out |= _expr_attrs(a)
        return out
    return set()


def _expr_consts(e: Expr) -> list:
    if isinstance(e, Const):
        return [e.value]
    if isinstance(e, Op):
        out = []
        for a in e.args:
            out.extend(_expr_consts(a))
        return out
    return []


# ---------------------------------------------------------------------------
# Restriction-function instantiation


class _Unresolved(Exception):
    pass


def _instantiate_expr(e: Expr, env: AttrEnv, values: tuple) -> Expr:
    if isinstance(e, MsgIdx):
        if 0 <= e.index < len(values):
            return Const(values[e.index])
        raise _Unresolved()
    if isinstance(e, SndAttr):
        v = env.get(e.name)
        if v is None:
            raise _Unresolved()
        return Const(v)
    if isinstance(e, Op):
        return Op(e.name, tuple(_instantiate_expr(a, env, values) for a in e.args))
    return e


def instantiate(fn: RestrictionFn, env: AttrEnv, values: tuple) -> Predicate:
    """Evaluate a restriction template against a sender environment and
    value tuple.  Atoms with out-of-range msg indices or undefined sender
    attributes collapse to ff."""
    return _inst_pred(fn.template, env, values)


def _inst_pred(pred: Predicate, env: AttrEnv, values: tuple) -> Predicate:
    if isinstance(pred, (Tt, Ff)):
        return pred
    if isinstance(pred, Atom):
        try:
            return Atom(
                pred.op,
                _instantiate_expr(pred.left, env, values),
                _instantiate_expr(pred.right, env, values),
            )
        except _Unresolved:
            return FF
    if isinstance(pred, Not):
        return Not(_inst_pred(pred.pred, env, values))
    if isinstance(pred, And):
        return And(_inst_pred(pred.left, env, values), _inst_pred(pred.right, env, values))
    if isinstance(pred, Or):
        return Or(_inst_pred(pred.left, env, values), _inst_pred(pred.right, env, values))
    raise TypeError(f"not a predicate: {pred!r}")


# ---------------------------------------------------------------------------
# Domain contexts


@dataclass(frozen=True)
class DomainContext:
    """Declared finite domains for attributes; absence means the domain of
    the relevant sort is unbounded."""

    items: tuple = ()

    @staticmethod
    def of(mapping) -> "DomainContext":
        items = tuple(
            sorted(((a, frozenset(vs)) for a, vs in mapping.items()), key=lambda it: it[0])
        )
        return DomainContext(items)

    def get(self, attr: str):
        for a, vs in self.items:
            if a == attr:
                return vs
        return None

    def merged(self, other: "DomainContext") -> "DomainContext":
        d = {a: vs for a, vs in self.items}
        for a, vs in other.items:
            d.setdefault(a, vs)
        return DomainContext.of(d)


EMPTY_DOMAINS = DomainContext()


# ---------------------------------------------------------------------------
# Finite-witness solver


_FRESH = "zz#fresh"

_sat_cache: dict = {}


def _candidate_pool(pred: Predicate) -> tuple:
    consts = []
    order_atoms = False
    mem_on_attr = False
    for a in _atoms(pred):
        consts.extend(_expr_consts(a.left))
        consts.extend(_expr_consts(a.right))
        if a.op in _ORDER_OPS:
            order_atoms = True
        if a.op == "in" and _expr_attrs(a.right):
            mem_on_attr = True

    pool = []
    seen = set()

    def add(v):
        k = value_key(v)
        if k not in seen:
            seen.add(k)
            pool.append(v)

    for v in consts:
        add(v)
    ints = sorted({v for v in consts if isinstance(v, int) and not isinstance(v, bool)})
    if order_atoms:
        if not ints:
            add(0)
            add(1)
        else:
            add(ints[0] - 1)
            add(ints[-1] + 1)
            for lo, hi in zip(ints, ints[1:]):
                if hi - lo > 1:
                    add((lo + hi) // 2)
    add(_FRESH)
    if mem_on_attr:
        # membership tests against an attribute need set candidates
        for v in list(pool):
            if not isinstance(v, (tuple, frozenset)):
                add(frozenset({v}))
        add(frozenset())
    return tuple(pool)


def _witness_envs(pred: Predicate, domains: DomainContext):
    attrs = sorted(pred_attrs(pred))
    pool = _candidate_pool(pred)
    per_attr = []
    for a in attrs:
        dom = domains.get(a)
        cands = sorted(dom, key=value_key) if dom is not None else pool
        per_attr.append((a, tuple(cands)))

    def gen(i, acc):
        if i == len(per_attr):
            yield AttrEnv.of(acc)
            return
        a, cands = per_attr[i]
        for v in cands:
            acc[a] = v
            yield from gen(i + 1, acc)
        acc.pop(a, None)

    yield from gen(0, {})


def is_sat(pred: Predicate, domains: DomainContext = EMPTY_DOMAINS) -> bool:
    """True iff some total valuation of the mentioned attributes that
    respects the declared domains satisfies the (closed) predicate;
    decided by finite witness enumeration."""
    return find_witness(pred, domains) is not None


def find_witness(pred: Predicate, domains: DomainContext = EMPTY_DOMAINS):
    if isinstance(pred, Tt):
        return AttrEnv()
    if isinstance(pred, Ff):
        return None
    key = (pred, domains)
    if key in _sat_cache:
        return _sat_cache[key]
    found = None
    for env in _witness_envs(pred, domains):
        if satisfies(env, pred):
            found = env
            break
    _sat_cache[key] = found
    return found


def implies(p1: Predicate, p2: Predicate, domains: DomainContext = EMPTY_DOMAINS) -> bool:
    return not is_sat(And(p1, Not(p2)), domains)


def equiv(p1: Predicate, p2: Predicate, domains: DomainContext = EMPTY_DOMAINS) -> bool:
    if p1 == p2:
        return True
    return implies(p1, p2, domains) and implies(p2, p1, domains)


def is_ff(pred: Predicate, domains: DomainContext = EMPTY_DOMAINS) -> bool:
    return not is_sat(pred, domains)

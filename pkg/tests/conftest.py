"""Shared generators and oracles for the test suite.

The predicate oracle enumerates every total attribute valuation over
declared finite domains, which makes it an exact, independent reference
for the witness-enumeration solver whenever all mentioned attributes
carry domains.
"""

import itertools
import random

import pytest

from abcalc import predicates as pr
from abcalc import semantics as sem
from abcalc.predicates import And, Atom, DomainContext, FF, Not, Or, TT
from abcalc.terms import (
    Attr,
    AttrEnv,
    Aware,
    Choice,
    Const,
    In,
    Inact,
    Leaf,
    Out,
    ParC,
    ParP,
    RestrictionFn,
    SelfAttr,
    Upd,
    Var,
    ZERO,
)

# ---------------------------------------------------------------------------
# Brute-force predicate oracle

ORACLE_DOMAINS = DomainContext.of(
    {"a": {1, 2, 3}, "b": {"x", "y"}, "c": {0, 5}}
)


def oracle_models(pred, domains=ORACLE_DOMAINS):
    """Every total domain-respecting valuation of the attributes
    mentioned in the predicate."""
    attrs = sorted(pr.pred_attrs(pred))
    choices = []
    for a in attrs:
        dom = domains.get(a)
        assert dom is not None, f"oracle needs a declared domain for {a}"
        choices.append([(a, v) for v in sorted(dom, key=repr)])
    for combo in itertools.product(*choices):
        yield AttrEnv.of(dict(combo))


def oracle_is_sat(pred, domains=ORACLE_DOMAINS):
    return any(pr.satisfies(env, pred) for env in oracle_models(pred, domains))


def oracle_implies(p1, p2, domains=ORACLE_DOMAINS):
    combined = And(p1, Not(p2))
    return not any(
        pr.satisfies(env, combined) for env in oracle_models(combined, domains)
    )


# ---------------------------------------------------------------------------
# Random predicates over the oracle domains

_INT_OPS = ("==", "!=", "<", "<=", ">", ">=")


def random_atom(rng: random.Random):
    attr = rng.choice(["a", "b", "c"])
    if attr == "a":
        consts = [0, 1, 2, 3, 4]
    elif attr == "b":
        consts = ["x", "y", "z"]
    else:
        consts = [0, 5, 7]
    kind = rng.random()
    if kind < 0.2:
        other = rng.choice(["a", "b", "c"])
        return Atom(rng.choice(("==", "!=")), Attr(attr), Attr(other))
    if kind < 0.35:
        members = frozenset(rng.sample(consts, rng.randint(1, 2)))
        return Atom("in", Attr(attr), Const(members))
    op = rng.choice(_INT_OPS) if attr != "b" else rng.choice(("==", "!="))
    return Atom(op, Attr(attr), Const(rng.choice(consts)))


def random_pred(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.35:
        r = rng.random()
        if r < 0.05:
            return TT
        if r < 0.1:
            return FF
        return random_atom(rng)
    shape = rng.random()
    if shape < 0.25:
        return Not(random_pred(rng, depth - 1))
    ctor = And if shape < 0.65 else Or
    return ctor(random_pred(rng, depth - 1), random_pred(rng, depth - 1))


# ---------------------------------------------------------------------------
# Random components

PROBE_MESSAGES = (
    sem.Label(sem.IN, AttrEnv(), pr.TT, (1,)),
    sem.Label(sem.IN, AttrEnv(), pr.TT, (2,)),
    sem.Label(sem.IN, AttrEnv.of({"a": 1}), pr.TT, ("n",)),
)


def random_guard(rng: random.Random):
    """A shallow predicate over the component attributes d and e."""
    r = rng.random()
    if r < 0.15:
        return TT
    if r < 0.25:
        return FF
    attr = rng.choice(["d", "e"])
    return Atom(rng.choice(("==", "!=")), Attr(attr), Const(rng.randint(1, 3)))


def random_recv_guard(rng: random.Random, var: str):
    r = rng.random()
    if r < 0.3:
        return TT
    if r < 0.6:
        return Atom("==", Var(var), Const(rng.randint(1, 2)))
    return Atom("==", SelfAttr("d"), Const(rng.randint(1, 3)))


def random_process(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        return Inact()
    shape = rng.random()
    cont = lambda: random_process(rng, depth - 1)
    if shape < 0.3:
        exprs = tuple(Const(rng.randint(1, 3)) for _ in range(rng.randint(0, 2)))
        return Out(exprs, random_guard(rng), cont())
    if shape < 0.5:
        var = "x"
        return In(random_recv_guard(rng, var), (var,), cont())
    if shape < 0.6:
        return Aware(random_guard(rng), cont())
    if shape < 0.7:
        body = cont()
        assigns = (("d", Const(rng.randint(1, 3))),)
        if isinstance(body, Upd):
            # adjacent update prefixes are one syntactic block
            return Upd(assigns + body.assigns, body.cont)
        return Upd(assigns, body)
    if shape < 0.85:
        return Choice(cont(), cont())
    return ParP(cont(), cont())


def random_leaf(rng: random.Random, depth: int = 3) -> Leaf:
    env = {"d": rng.randint(1, 3), "e": rng.randint(1, 3)}
    iface = frozenset(rng.sample(["d", "e"], rng.randint(0, 2)))
    return Leaf(AttrEnv.of(env), iface, random_process(rng, depth))


def random_component(rng: random.Random, depth: int = 2):
    if depth == 0 or rng.random() < 0.6:
        return random_leaf(rng)
    return ParC(random_component(rng, depth - 1), random_component(rng, depth - 1))


RESTRICTION_POOL = (
    RestrictionFn("ftt", TT),
    RestrictionFn("fff", FF),
    RestrictionFn("fmsg", Atom("==", pr.MsgIdx(0), Const(1))),
    RestrictionFn("fsnd", Atom("!=", pr.SndAttr("d"), Const(2))),
)


def random_restriction(rng: random.Random) -> RestrictionFn:
    return rng.choice(RESTRICTION_POOL)


# ---------------------------------------------------------------------------
# Equivalence-preserving rewrites (each instance of a proved law)


def _rewrite_proc(rng: random.Random, p):
    choices = []
    if isinstance(p, Choice):
        choices.append(lambda: Choice(p.right, p.left))
    if isinstance(p, ParP):
        choices.append(lambda: ParP(p.right, p.left))
    choices.append(lambda: Aware(TT, p))
    choices.append(lambda: Choice(p, ZERO))
    choices.append(lambda: ParP(p, ZERO))
    choices.append(lambda: Choice(p, p))
    return rng.choice(choices)()


def rewrite_equivalent(rng: random.Random, comp):
    """A component bisimilar to the argument, obtained by one law
    instance applied at a random position."""
    if isinstance(comp, ParC):
        r = rng.random()
        if r < 0.3:
            return ParC(comp.right, comp.left)
        if r < 0.5:
            return ParC(rewrite_equivalent(rng, comp.left), comp.right)
        if r < 0.7:
            return ParC(comp.left, rewrite_equivalent(rng, comp.right))
        return ParC(comp, Leaf(AttrEnv(), frozenset(), ZERO))
    if isinstance(comp, Leaf):
        if rng.random() < 0.3:
            return ParC(comp, Leaf(AttrEnv(), frozenset(), ZERO))
        return Leaf(comp.env, comp.iface, _rewrite_proc(rng, comp.proc))
    return comp


# ---------------------------------------------------------------------------
# Random broadcast terms

_CHANS = ("a", "b", "c")
_NAMES = ("u", "v", "w")


def random_bpi_seq(rng: random.Random, depth: int = 3):
    """A random sequential term (no parallel composition)."""
    from abcalc import bpi as bp

    if depth == 0 or rng.random() < 0.25:
        return bp.BNIL
    shape = rng.random()
    if shape < 0.2:
        return bp.BTau(random_bpi_seq(rng, depth - 1))
    if shape < 0.5:
        names = tuple(rng.sample(_NAMES, rng.randint(0, 2)))
        return bp.BOut(rng.choice(_CHANS), names, random_bpi_seq(rng, depth - 1))
    if shape < 0.8:
        vars_ = tuple(rng.sample(("x", "y"), rng.randint(0, 2)))
        return bp.BIn(rng.choice(_CHANS), vars_, random_bpi_seq(rng, depth - 1))
    return bp.BSum(random_bpi_seq(rng, depth - 1), random_bpi_seq(rng, depth - 1))


def random_bpi(rng: random.Random, depth: int = 3):
    """A random closed term: parallel composition of sequential terms."""
    from abcalc import bpi as bp

    p = random_bpi_seq(rng, depth)
    for _ in range(rng.randint(0, 2)):
        p = bp.BPar(p, random_bpi_seq(rng, depth - 1))
    return p


# ---------------------------------------------------------------------------
# Shared universe helper for law checks


def law_universe(c1, c2, defs=None, domains=pr.EMPTY_DOMAINS):
    """Auto universes of both sides plus the fixed probe messages, so that
    input behaviour is actually exercised."""
    from abcalc.lts import LabelUniverse, auto_universe

    u = auto_universe(c1, defs, domains=domains)
    u = u.merged(auto_universe(c2, defs, domains=domains), domains)
    return u.merged(LabelUniverse(PROBE_MESSAGES), domains)


@pytest.fixture
def rng():
    return random.Random(20260826)


# ---------------------------------------------------------------------------
# Acceptance reporting: one pass/fail line per criterion at the end of the
# run, collected by tests/test_acceptance.py.

ACCEPTANCE_RESULTS = []


def record_acceptance(number: int, title: str, ok: bool, detail: str = ""):
    tail = f" ({detail})" if detail else ""
    ACCEPTANCE_RESULTS.append(
        f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}{tail}"
    )
    assert ok, f"acceptance criterion {number} failed: {title}{tail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)

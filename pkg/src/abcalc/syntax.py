"""Concrete syntax: tokenizer, parsers for the attribute-based language
and the broadcast calculus, and the pretty-printers that invert them.

The grammar is LL with one token of lookahead except for two spots where
the parser scans ahead to a matching parenthesis: distinguishing output
prefixes, input prefixes and grouping (all start with `(`), and binding
the message variables of an input before re-reading its predicate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import bpi as bp
from . import predicates as pr
from . import semantics as sem
from .lts import LabelUniverse
from .predicates import And, Atom, DomainContext, EMPTY_DOMAINS, FF, Ff, Not, Or, TT, Tt
from .terms import (
    Attr,
    AttrEnv,
    Aware,
    Call,
    Choice,
    Component,
    Const,
    In,
    Inact,
    Leaf,
    MsgIdx,
    Op,
    OPERATORS,
    Out,
    ParC,
    ParP,
    Process,
    ResIn,
    ResOut,
    RestrictionFn,
    SelfAttr,
    SndAttr,
    Upd,
    Var,
    value_key,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'int', 'str', 'sym', 'eof'
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>//[^\n]*)
      | (?P<nl>\n)
      | (?P<int>\d+)
      | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<str>"(?:[^"\\\n]|\\.)*")
      | (?P<sym>:=|==|!=|<=|>=|&&|\|\||[-+*.,;:@=!<>(){}\[\]|])
    """,
    re.VERBOSE,
)


def tokenize(text: str):
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(raw)
        else:
            toks.append(Token(kind, raw, line, col))
            col += len(raw)
        i = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


_RELOPS = ("==", "!=", "<", "<=", ">", ">=")
_KEYWORDS = {
    "comp", "iface", "env", "run", "def", "fn", "domain", "system",
    "universe", "restrictOut", "restrictIn", "this", "msg", "snd",
    "tt", "ff", "true", "false", "in", "tup", "proj", "insert",
    "remove", "contains", "nil", "tau", "rec",
}


@dataclass
class Model:
    """A parsed source file: the system component plus its context."""

    component: Component = None
    defs: dict = field(default_factory=dict)
    fns: dict = field(default_factory=dict)
    domains: DomainContext = EMPTY_DOMAINS
    universe: LabelUniverse = field(default_factory=LabelUniverse)
    components: dict = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.value == value and tok.kind in ("sym", "id")

    def eat(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            tok = self.peek()
            raise ParseError(f"expected {value!r}, found {tok.value!r}", tok.line, tok.col)
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "id" or tok.value in _KEYWORDS:
            raise ParseError(f"expected {what}, found {tok.value!r}", tok.line, tok.col)
        self.advance()
        return tok.value

    def done(self):
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"trailing input {tok.value!r}", tok.line, tok.col)

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def match_paren(self, start: int) -> int:
        """Index of the token closing the parenthesis at index start."""
        depth = 0
        for i in range(start, len(self.toks)):
            v = self.toks[i].value
            if self.toks[i].kind != "sym":
                continue
            if v == "(":
                depth += 1
            elif v == ")":
                depth -= 1
                if depth == 0:
                    return i
        tok = self.toks[start]
        raise ParseError("unbalanced parenthesis", tok.line, tok.col)

    # -- literal values

    def value(self):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return int(tok.value)
        if tok.value == "-" and self.peek(1).kind == "int":
            self.advance()
            return -int(self.advance().value)
        if tok.kind == "str":
            self.advance()
            return _unquote(tok.value)
        if tok.value == "true":
            self.advance()
            return True
        if tok.value == "false":
            self.advance()
            return False
        if self.eat("{"):
            items = []
            if not self.at("}"):
                items.append(self.value())
                while self.eat(","):
                    items.append(self.value())
            self.expect("}")
            return frozenset(items)
        if self.eat("tup"):
            self.expect("(")
            items = []
            if not self.at(")"):
                items.append(self.value())
                while self.eat(","):
                    items.append(self.value())
            self.expect(")")
            return tuple(items)
        self.fail(f"expected a literal value, found {tok.value!r}")

    # -- expressions

    def expr(self, bound: frozenset):
        left = self.term(bound)
        while self.at("+") or self.at("-"):
            op = self.advance().value
            left = Op(op, (left, self.term(bound)))
        return left

    def term(self, bound: frozenset):
        left = self.factor(bound)
        while self.at("*"):
            self.advance()
            left = Op("*", (left, self.factor(bound)))
        return left

    def factor(self, bound: frozenset):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Const(int(tok.value))
        if tok.value == "-" and self.peek(1).kind == "int":
            self.advance()
            return Const(-int(self.advance().value))
        if tok.kind == "str":
            self.advance()
            return Const(_unquote(tok.value))
        if tok.value in ("true", "false"):
            self.advance()
            return Const(tok.value == "true")
        if tok.value == "{":
            return Const(self.value())
        if self.eat("this"):
            self.expect(".")
            return SelfAttr(self.ident("attribute"))
        if self.eat("msg"):
            self.expect("[")
            idx = self.peek()
            if idx.kind != "int":
                self.fail("expected a message index")
            self.advance()
            self.expect("]")
            return MsgIdx(int(idx.value))
        if self.eat("snd"):
            self.expect(".")
            return SndAttr(self.ident("attribute"))
        if tok.kind == "id" and tok.value in OPERATORS and tok.value not in "+-*":
            self.advance()
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expr(bound))
                while self.eat(","):
                    args.append(self.expr(bound))
            self.expect(")")
            return Op(tok.value, tuple(args))
        if tok.kind == "id" and tok.value not in _KEYWORDS:
            self.advance()
            return Var(tok.value) if tok.value in bound else Attr(tok.value)
        if self.eat("("):
            e = self.expr(bound)
            self.expect(")")
            return e
        self.fail(f"expected an expression, found {tok.value!r}")

    # -- predicates

    def pred(self, bound: frozenset):
        left = self.pred_and(bound)
        while self.at("||"):
            self.advance()
            left = Or(left, self.pred_and(bound))
        return left

    def pred_and(self, bound: frozenset):
        left = self.pred_not(bound)
        while self.at("&&"):
            self.advance()
            left = And(left, self.pred_not(bound))
        return left

    def pred_not(self, bound: frozenset):
        if self.eat("!"):
            return Not(self.pred_not(bound))
        return self.pred_primary(bound)

    def pred_primary(self, bound: frozenset):
        if self.eat("tt"):
            return TT
        if self.eat("ff"):
            return FF
        if self.at("("):
            save = self.pos
            try:
                self.advance()
                inner = self.pred(bound)
                self.expect(")")
            except ParseError:
                self.pos = save
            else:
                nxt = self.peek().value
                if nxt not in _RELOPS and nxt not in ("in", "+", "-", "*"):
                    return inner
                self.pos = save
        return self.atom(bound)

    def atom(self, bound: frozenset):
        left = self.expr(bound)
        tok = self.peek()
        if tok.value in _RELOPS or tok.value == "in":
            self.advance()
            return Atom(tok.value, left, self.expr(bound))
        self.fail(f"expected a comparison operator, found {tok.value!r}")

    def guard(self, bound: frozenset):
        """Predicate in guard position: tt, ff, or parenthesized."""
        if self.eat("tt"):
            return TT
        if self.eat("ff"):
            return FF
        self.expect("(")
        p = self.pred(bound)
        self.expect(")")
        return p

    # -- processes

    def process(self, bound: frozenset):
        left = self.proc_par(bound)
        while self.at("+"):
            self.advance()
            left = Choice(left, self.proc_par(bound))
        return left

    def proc_par(self, bound: frozenset):
        left = self.proc_pre(bound)
        while self.at("|"):
            self.advance()
            left = ParP(left, self.proc_pre(bound))
        return left

    def proc_pre(self, bound: frozenset):
        tok = self.peek()
        if tok.kind == "int" and tok.value == "0":
            self.advance()
            return Inact()
        if self.at("["):
            assigns = []
            while self.eat("["):
                attr = self.ident("attribute")
                self.expect(":=")
                assigns.append((attr, self.expr(bound)))
                self.expect("]")
            return Upd(tuple(assigns), self.proc_pre(bound))
        if self.eat("<"):
            p = self.guard(bound)
            self.expect(">")
            return Aware(p, self.proc_pre(bound))
        if self.at("("):
            close = self.match_paren(self.pos)
            after = self.toks[close + 1].value if close + 1 < len(self.toks) else ""
            if after == "@":
                self.advance()
                exprs = []
                if not self.at(")"):
                    exprs.append(self.expr(bound))
                    while self.eat(","):
                        exprs.append(self.expr(bound))
                self.expect(")")
                self.expect("@")
                p = self.guard(bound)
                self.expect(".")
                return Out(tuple(exprs), p, self.proc_pre(bound))
            if after == "(":
                # input: read the binders first, then the guard with
                # them in scope (the guard may mention the binders)
                guard_open = self.pos
                vstart = close + 1
                vclose = self.match_paren(vstart)
                self.pos = vstart
                self.expect("(")
                vars_ = []
                if not self.at(")"):
                    vars_.append(self.ident("variable"))
                    while self.eat(","):
                        vars_.append(self.ident("variable"))
                self.expect(")")
                inner = bound | frozenset(vars_)
                self.pos = guard_open
                p = self.guard(inner)
                if self.pos != vstart:
                    self.fail("malformed input guard")
                self.pos = vclose + 1
                self.expect(".")
                return In(p, tuple(vars_), self.proc_pre(inner))
            self.advance()
            p = self.process(bound)
            self.expect(")")
            return p
        if tok.kind == "id" and tok.value not in _KEYWORDS:
            self.advance()
            args = []
            if self.eat("("):
                if not self.at(")"):
                    args.append(self.expr(bound))
                    while self.eat(","):
                        args.append(self.expr(bound))
                self.expect(")")
            return Call(tok.value, tuple(args))
        self.fail(f"expected a process, found {tok.value!r}")

    # -- components

    def component(self, model: Model):
        left = self.comp_term(model)
        while self.at("||"):
            self.advance()
            left = ParC(left, self.comp_term(model))
        return left

    def comp_term(self, model: Model):
        if self.at("comp"):
            return self.comp_block(model)
        if self.eat("restrictOut"):
            return self.restriction(model, ResOut)
        if self.eat("restrictIn"):
            return self.restriction(model, ResIn)
        if self.eat("("):
            c = self.component(model)
            self.expect(")")
            return c
        name = self.ident("component name")
        if name not in model.components:
            self.fail(f"unknown component {name!r}")
        return model.components[name]

    def restriction(self, model: Model, ctor):
        self.expect("(")
        fname = self.ident("restriction function")
        if fname not in model.fns:
            self.fail(f"unknown restriction function {fname!r}")
        self.expect(")")
        self.expect("{")
        inner = self.component(model)
        self.expect("}")
        return ctor(inner, model.fns[fname])

    def comp_block(self, model: Model):
        self.expect("comp")
        name = None
        if self.peek().kind == "id" and self.peek().value not in _KEYWORDS:
            name = self.advance().value
        self.expect("{")
        self.expect("iface")
        self.expect(":")
        self.expect("[")
        iface = []
        if not self.at("]"):
            iface.append(self.ident("attribute"))
            while self.eat(","):
                iface.append(self.ident("attribute"))
        self.expect("]")
        self.expect(";")
        self.expect("env")
        self.expect(":")
        self.expect("{")
        envmap = {}
        if not self.at("}"):
            while True:
                attr = self.ident("attribute")
                self.expect("=")
                envmap[attr] = self.value()
                if not self.eat(","):
                    break
        self.expect("}")
        self.expect(";")
        self.expect("run")
        self.expect(":")
        proc = self.process(frozenset())
        self.expect("}")
        leaf = Leaf(AttrEnv.of(envmap), frozenset(iface), proc)
        if name is not None:
            model.components[name] = leaf
        return leaf

    # -- top level

    def model(self) -> Model:
        model = Model()
        domains = {}
        system = None
        labels = []
        while self.peek().kind != "eof":
            if self.at("domain"):
                self.advance()
                attr = self.ident("attribute")
                self.expect("in")
                vals = self.value()
                if not isinstance(vals, frozenset):
                    self.fail("domain must be a set literal")
                domains[attr] = vals
                self.expect(";")
            elif self.at("def"):
                self.advance()
                name = self.ident("definition name")
                params = []
                if self.eat("("):
                    if not self.at(")"):
                        params.append(self.ident("parameter"))
                        while self.eat(","):
                            params.append(self.ident("parameter"))
                    self.expect(")")
                self.expect("=")
                body = self.process(frozenset(params))
                self.expect(";")
                model.defs[name] = (tuple(params), body)
            elif self.at("fn"):
                self.advance()
                name = self.ident("restriction function name")
                self.expect("=")
                template = self.guard(frozenset())
                self.expect(";")
                model.fns[name] = RestrictionFn(name, template)
            elif self.at("comp"):
                self.comp_block(model)
            elif self.at("system"):
                self.advance()
                self.expect(":")
                system = self.component(model)
                self.expect(";")
            elif self.at("universe"):
                self.advance()
                self.expect("{")
                while not self.at("}"):
                    labels.append(self.universe_entry())
                self.expect("}")
            else:
                self.fail(f"unexpected {self.peek().value!r} at top level")
        model.domains = DomainContext.of(domains) if domains else EMPTY_DOMAINS
        model.universe = LabelUniverse(tuple(labels))
        if system is None and len(model.components) == 1:
            system = next(iter(model.components.values()))
        model.component = system
        return model

    def universe_entry(self):
        self.expect("msg")
        self.expect("{")
        envmap = {}
        if not self.at("}"):
            while True:
                attr = self.ident("attribute")
                self.expect("=")
                envmap[attr] = self.value()
                if not self.eat(","):
                    break
        self.expect("}")
        self.expect("@")
        p = self.guard(frozenset())
        self.expect("(")
        values = []
        if not self.at(")"):
            values.append(self.value())
            while self.eat(","):
                values.append(self.value())
        self.expect(")")
        self.expect(";")
        return sem.Label(sem.IN, AttrEnv.of(envmap), p, tuple(values))

    # -- broadcast calculus

    def bpi(self):
        left = self.bpi_seq()
        while self.at("||"):
            self.advance()
            left = bp.BPar(left, self.bpi_seq())
        return left

    def bpi_seq(self):
        left = self.bpi_pre()
        while self.at("+"):
            self.advance()
            left = bp.BSum(left, self.bpi_pre())
        return left

    def bpi_pre(self):
        if self.eat("nil"):
            return bp.BNIL
        if self.eat("tau"):
            self.expect(".")
            return bp.BTau(self.bpi_pre())
        if self.at("("):
            if self.peek(1).value == "rec":
                self.advance()
                self.advance()
                name = self.ident("recursion name")
                params = self.bpi_names()
                self.expect(".")
                body = self.bpi_seq()
                self.expect(")")
                args = self.bpi_names()
                return bp.BRec(name, params, body, args)
            self.advance()
            p = self.bpi()
            self.expect(")")
            return p
        name = self.ident("name")
        if self.eat("!"):
            values = self.bpi_names()
            self.expect(".")
            return bp.BOut(name, values, self.bpi_pre())
        if self.at("("):
            vars_ = self.bpi_names()
            if self.eat("."):
                return bp.BIn(name, vars_, self.bpi_pre())
            return bp.BCall(name, vars_)
        return bp.BCall(name, ())

    def bpi_names(self):
        self.expect("(")
        names = []
        if not self.at(")"):
            names.append(self.ident("name"))
            while self.eat(","):
                names.append(self.ident("name"))
        self.expect(")")
        return tuple(names)


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    return body.replace('\\"', '"').replace("\\\\", "\\")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# Public parsing API


def parse_abc(text: str) -> Model:
    p = _Parser(text)
    return p.model()


def parse_process(text: str, bound=frozenset()) -> Process:
    p = _Parser(text)
    out = p.process(frozenset(bound))
    p.done()
    return out


def parse_predicate(text: str, bound=frozenset()):
    p = _Parser(text)
    out = p.pred(frozenset(bound))
    p.done()
    return out


def parse_bpi(text: str):
    p = _Parser(text)
    out = p.bpi()
    p.done()
    return out


# ---------------------------------------------------------------------------
# Pretty-printing


def pretty_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, tuple):
        return "tup(" + ", ".join(pretty_value(x) for x in v) + ")"
    if isinstance(v, frozenset):
        return "{" + ", ".join(pretty_value(x) for x in sorted(v, key=value_key)) + "}"
    raise TypeError(f"not a value: {v!r}")


def pretty_expr(e) -> str:
    if isinstance(e, Const):
        return pretty_value(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Attr):
        return e.name
    if isinstance(e, SelfAttr):
        return f"this.{e.name}"
    if isinstance(e, MsgIdx):
        return f"msg[{e.index}]"
    if isinstance(e, SndAttr):
        return f"snd.{e.name}"
    if isinstance(e, Op):
        if e.name in ("+", "-", "*"):
            l, r = e.args
            return f"({pretty_expr(l)} {e.name} {pretty_expr(r)})"
        return e.name + "(" + ", ".join(pretty_expr(a) for a in e.args) + ")"
    raise TypeError(f"not an expression: {e!r}")


def pretty_pred(p) -> str:
    if isinstance(p, Tt):
        return "tt"
    if isinstance(p, Ff):
        return "ff"
    if isinstance(p, Atom):
        return f"{pretty_expr(p.left)} {p.op} {pretty_expr(p.right)}"
    if isinstance(p, Not):
        return f"!({pretty_pred(p.pred)})"
    if isinstance(p, And):
        return f"({pretty_pred(p.left)} && {pretty_pred(p.right)})"
    if isinstance(p, Or):
        return f"({pretty_pred(p.left)} || {pretty_pred(p.right)})"
    raise TypeError(f"not a predicate: {p!r}")


def _guard_text(p) -> str:
    text = pretty_pred(p)
    if text in ("tt", "ff"):
        return text
    if text.startswith("(") and _closes_at_end(text):
        return text
    return f"({text})"


def _closes_at_end(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i == len(text) - 1
    return False


def pretty_process(p) -> str:
    from .terms import Inact as _I

    if isinstance(p, _I):
        return "0"
    if isinstance(p, Out):
        exprs = ", ".join(pretty_expr(e) for e in p.exprs)
        return f"({exprs})@{_guard_text(p.pred)}.{_pre_text(p.cont)}"
    if isinstance(p, In):
        vars_ = ", ".join(p.vars)
        return f"{_in_guard_text(p.pred)}({vars_}).{_pre_text(p.cont)}"
    if isinstance(p, Upd):
        parts = "".join(f"[{a} := {pretty_expr(e)}]" for a, e in p.assigns)
        return f"{parts} {_pre_text(p.cont)}"
    if isinstance(p, Aware):
        return f"<{_guard_text(p.pred)}> {_pre_text(p.proc)}"
    if isinstance(p, Choice):
        left = pretty_process(p.left)
        right = pretty_process(p.right)
        if isinstance(p.right, Choice):
            right = f"({right})"
        return f"{left} + {right}"
    if isinstance(p, ParP):
        left = pretty_process(p.left) if isinstance(p.left, ParP) else _pre_text(p.left)
        right = _pre_text(p.right)
        return f"{left} | {right}"
    if isinstance(p, Call):
        if p.args:
            return p.name + "(" + ", ".join(pretty_expr(a) for a in p.args) + ")"
        return p.name
    raise TypeError(f"not a process: {p!r}")


def _in_guard_text(p) -> str:
    text = _guard_text(p)
    if text in ("tt", "ff"):
        return f"({text})"
    return text


def _pre_text(p) -> str:
    if isinstance(p, (Choice, ParP)):
        return f"({pretty_process(p)})"
    return pretty_process(p)


def pretty_env(env: AttrEnv) -> str:
    inner = ", ".join(f"{a} = {pretty_value(v)}" for a, v in env.items)
    return "{" + inner + "}"


def pretty_component(c) -> str:
    if isinstance(c, Leaf):
        iface = ", ".join(sorted(c.iface))
        return (
            "comp { iface: [" + iface + "]; env: " + pretty_env(c.env)
            + "; run: " + pretty_process(c.proc) + " }"
        )
    if isinstance(c, ParC):
        left = pretty_component(c.left) if isinstance(c.left, ParC) else _comp_text(c.left)
        return f"{left} || {_comp_text(c.right)}"
    if isinstance(c, ResOut):
        return "restrictOut(" + c.fn.name + "){ " + pretty_component(c.comp) + " }"
    if isinstance(c, ResIn):
        return "restrictIn(" + c.fn.name + "){ " + pretty_component(c.comp) + " }"
    raise TypeError(f"not a component: {c!r}")


def _comp_text(c) -> str:
    if isinstance(c, ParC):
        return f"({pretty_component(c)})"
    return pretty_component(c)


def pretty_label(lab: sem.Label) -> str:
    mark = "!" if lab.kind == sem.OUT else "?"
    values = ", ".join(pretty_value(v) for v in lab.values)
    return f"{pretty_env(lab.env)}@{_guard_text(lab.pred)}{mark}({values})"


def pretty_universe(universe: LabelUniverse) -> str:
    lines = ["universe {"]
    for lab in universe.labels:
        values = ", ".join(pretty_value(v) for v in lab.values)
        lines.append(f"  msg {pretty_env(lab.env)} @ {_guard_text(lab.pred)} ({values});")
    lines.append("}")
    return "\n".join(lines)


def pretty_model(model: Model) -> str:
    lines = []
    for attr, vals in model.domains.items:
        lines.append(f"domain {attr} in {pretty_value(frozenset(vals))};")
    for name, fn in sorted(model.fns.items()):
        lines.append(f"fn {name} = {_guard_text(fn.template)};")
    for name, (params, body) in sorted(model.defs.items()):
        head = f"def {name}({', '.join(params)})" if params else f"def {name}"
        lines.append(f"{head} = {pretty_process(body)};")
    if model.component is not None:
        lines.append(f"system: {pretty_component(model.component)};")
    if model.universe.labels:
        lines.append(pretty_universe(model.universe))
    return "\n".join(lines) + "\n"


def pretty_bpi(p) -> str:
    if isinstance(p, bp.BNil):
        return "nil"
    if isinstance(p, bp.BTau):
        return f"tau.{_bpi_pre_text(p.cont)}"
    if isinstance(p, bp.BIn):
        return f"{p.chan}({', '.join(p.vars)}).{_bpi_pre_text(p.cont)}"
    if isinstance(p, bp.BOut):
        return f"{p.chan}!({', '.join(p.names)}).{_bpi_pre_text(p.cont)}"
    if isinstance(p, bp.BSum):
        left = pretty_bpi(p.left) if isinstance(p.left, bp.BSum) else _bpi_pre_text(p.left)
        return f"{left} + {_bpi_pre_text(p.right)}"
    if isinstance(p, bp.BRec):
        body = pretty_bpi(p.body)
        if isinstance(p.body, bp.BPar):
            body = f"({body})"
        return f"(rec {p.name}({', '.join(p.params)}).{body})({', '.join(p.args)})"
    if isinstance(p, bp.BCall):
        return f"{p.name}({', '.join(p.args)})"
    if isinstance(p, bp.BPar):
        left = pretty_bpi(p.left) if isinstance(p.left, bp.BPar) else _bpi_par_operand(p.left)
        return f"{left} || {_bpi_par_operand(p.right)}"
    raise TypeError(f"not a bpi process: {p!r}")


def _bpi_pre_text(p) -> str:
    if isinstance(p, (bp.BSum, bp.BPar)):
        return f"({pretty_bpi(p)})"
    return pretty_bpi(p)


def _bpi_par_operand(p) -> str:
    if isinstance(p, bp.BPar):
        return f"({pretty_bpi(p)})"
    return pretty_bpi(p)

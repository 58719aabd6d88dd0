"""Bounded exploration of the system transition relation into a finite
labeled transition system, with silent-move classification, weak closure,
predicate-indexed reductions, and Aldebaran export.

An input universe makes the environment finite: besides the autonomous
output moves, every state also reacts to each input label of the
universe.  The default universe is the shared-alphabet closure: explore
with no inputs, harvest the emitted non-silent output labels as inputs,
and iterate to a fixpoint.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

from . import predicates as pr
from . import semantics as sem
from .predicates import DomainContext, EMPTY_DOMAINS
from .terms import Component, canonical


class BoundExceeded(Exception):
    def __init__(self, message: str, frontier: int = 0):
        super().__init__(f"{message} (frontier size {frontier})")
        self.frontier = frontier


@dataclass(frozen=True)
class ExploreBounds:
    max_states: int = 100_000
    max_depth: int = 1_000


DEFAULT_BOUNDS = ExploreBounds()


@dataclass(frozen=True)
class LabelUniverse:
    """Finite set of input labels the environment may inject."""

    labels: tuple = ()

    def fingerprint(self) -> str:
        from .syntax import pretty_label

        text = "\n".join(sorted(pretty_label(lab) for lab in self.labels))
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    def merged(self, other: "LabelUniverse", domains: DomainContext = EMPTY_DOMAINS):
        out = list(self.labels)
        for lab in other.labels:
            if not any(_same_label(lab, have, domains) for have in out):
                out.append(lab)
        return LabelUniverse(_sorted_labels(out))


EMPTY_UNIVERSE = LabelUniverse()


def _sorted_labels(labels):
    from .syntax import pretty_label

    return tuple(sorted(labels, key=pretty_label))


def _same_label(l1, l2, domains) -> bool:
    from .equivalence import label_equiv

    return label_equiv(l1, l2, domains)


@dataclass
class Lts:
    states: list
    transitions: list  # (source id, Label, target id)
    initial: int = 0
    domains: DomainContext = EMPTY_DOMAINS
    universe: LabelUniverse = EMPTY_UNIVERSE
    _tau_cache: dict = field(default_factory=dict, repr=False)

    def is_tau(self, label: sem.Label) -> bool:
        if label.kind != sem.OUT:
            return False
        if label.pred not in self._tau_cache:
            self._tau_cache[label.pred] = pr.is_ff(label.pred, self.domains)
        return self._tau_cache[label.pred]

    def successors(self, state: int):
        return [(lab, dst) for src, lab, dst in self.transitions if src == state]

    def labels(self):
        seen = []
        for _, lab, _ in self.transitions:
            if lab not in seen:
                seen.append(lab)
        return seen


def _state_steps(comp: Component, defs, universe: LabelUniverse, strict: bool):
    steps = list(sem.system_out_steps(comp, defs, strict))
    for msg in universe.labels:
        for succ in sem.system_in_step(comp, msg, defs):
            steps.append((msg, succ))
    return steps


def explore(
    comp: Component,
    defs=None,
    universe: LabelUniverse = EMPTY_UNIVERSE,
    bounds: ExploreBounds = DEFAULT_BOUNDS,
    domains: DomainContext = EMPTY_DOMAINS,
    strict: bool = False,
) -> Lts:
    """Breadth-first exploration with deterministic state numbering:
    discovery order under sorted successor enumeration."""
    from .syntax import pretty_component, pretty_label

    defs = defs or {}
    c0 = canonical(comp)
    states = [c0]
    index = {c0: 0}
    depth = {0: 0}
    transitions = []
    queue = deque([0])
    while queue:
        src = queue.popleft()
        raw = _state_steps(states[src], defs, universe, strict)
        raw = [(lab, canonical(succ)) for lab, succ in raw]
        raw.sort(key=lambda st: (pretty_label(st[0]), pretty_component(st[1])))
        for lab, succ in raw:
            if succ not in index:
                if len(states) >= bounds.max_states:
                    raise BoundExceeded(
                        f"state bound {bounds.max_states} hit", frontier=len(queue)
                    )
                if depth[src] + 1 > bounds.max_depth:
                    raise BoundExceeded(
                        f"depth bound {bounds.max_depth} hit", frontier=len(queue)
                    )
                index[succ] = len(states)
                states.append(succ)
                depth[index[succ]] = depth[src] + 1
                queue.append(index[succ])
            transitions.append((src, lab, index[succ]))
    return Lts(states, transitions, 0, domains, universe)


def auto_universe(
    comp: Component,
    defs=None,
    bounds: ExploreBounds = DEFAULT_BOUNDS,
    domains: DomainContext = EMPTY_DOMAINS,
    base: LabelUniverse = EMPTY_UNIVERSE,
    max_rounds: int = 8,
) -> LabelUniverse:
    """Shared-alphabet closure: harvest emitted output labels as inputs
    until nothing new appears.  Silent outputs are never harvested."""
    universe = base
    for _ in range(max_rounds):
        lts = explore(comp, defs, universe, bounds, domains)
        fresh = []
        for _, lab, _ in lts.transitions:
            if lab.kind == sem.OUT and not lts.is_tau(lab):
                fresh.append(lab.as_input())
        grown = universe.merged(LabelUniverse(_sorted_labels(fresh)), domains)
        if len(grown.labels) == len(universe.labels):
            return grown
        universe = grown
    return universe


def weak_closure(lts: Lts):
    """For each state, the set of states reachable by zero or more
    silent moves."""
    tau_next = {i: set() for i in range(len(lts.states))}
    for src, lab, dst in lts.transitions:
        if lts.is_tau(lab):
            tau_next[src].add(dst)
    closure = []
    for start in range(len(lts.states)):
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in tau_next[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        closure.append(frozenset(seen))
    return tuple(closure)


def reduction_over(lts: Lts, pred, weak: bool = False):
    """State pairs connected by an output whose predicate is equivalent
    to the given one; the weak variant closes both sides under silent
    moves."""
    base = set()
    equiv_cache = {}
    for src, lab, dst in lts.transitions:
        if lab.kind != sem.OUT:
            continue
        if lab.pred not in equiv_cache:
            equiv_cache[lab.pred] = pr.equiv(lab.pred, pred, lts.domains)
        if equiv_cache[lab.pred]:
            base.add((src, dst))
    if not weak:
        return base
    closure = weak_closure(lts)
    out = set()
    for src, dst in base:
        pre = [s for s in range(len(lts.states)) if src in closure[s]]
        for s in pre:
            for t in closure[dst]:
                out.add((s, t))
    return out


def aut_text(lts: Lts) -> str:
    from .syntax import pretty_label

    lines = [f"des (0,{len(lts.transitions)},{len(lts.states)})"]
    for src, lab, dst in lts.transitions:
        text = "tau" if lts.is_tau(lab) else pretty_label(lab)
        text = text.replace('"', "'")
        lines.append(f'({src},"{text}",{dst})')
    return "\n".join(lines) + "\n"


def export_aut(lts: Lts, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(aut_text(lts))

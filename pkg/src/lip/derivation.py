"""Data derivation: the closure operator clo_a and its decision procedure.

The closure of a finite base is infinite (pairing never stops), so it is
never built.  Instead an *analysis set* is saturated with the decomposing
rules, and membership of a goal is then decided by recursive synthesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .terms import BASE, Agent, Enc, Hash, Message, Pair, Sig, TermTheory


class Knowledge:
    """What `agent` can derive from `base`: the analysis set plus a synthesis memo."""

    __slots__ = ("agent", "theory", "analysis", "_memo")

    def __init__(self, agent: str, base: frozenset, theory: TermTheory = BASE):
        self.agent = agent
        self.theory = theory
        self._memo: dict = {}
        self.analysis = frozenset(self._saturate(base))

    def _saturate(self, base) -> set:
        known = set(base)
        known.add(Agent(self.agent))
        todo = list(known)
        locked: list = []  # ciphertexts whose key is not derivable yet
        while True:
            while todo:
                t = todo.pop()
                parts = ()
                if isinstance(t, Pair):
                    parts = (t.left, t.right)
                elif isinstance(t, Sig):
                    # universal signature analysis yields <body, signer>
                    parts = (t.body, Agent(t.signer))
                elif isinstance(t, Enc) and self.theory.dolev_yao:
                    locked.append(t)
                for p in parts:
                    if p not in known:
                        known.add(p)
                        todo.append(p)
            # a newly analysed datum may unlock a key; retry the ciphertexts
            self._memo.clear()
            self.analysis = known
            still = []
            for c in locked:
                if self._synth(c.key):
                    if c.body not in known:
                        known.add(c.body)
                        todo.append(c.body)
                else:
                    still.append(c)
            locked = still
            if not todo:
                self._memo.clear()
                return known

    def _synth(self, goal) -> bool:
        hit = self._memo.get(goal)
        if hit is not None:
            return hit
        if goal in self.analysis:
            ok = True
        elif isinstance(goal, Pair):
            ok = self._synth(goal.left) and self._synth(goal.right)
        elif isinstance(goal, Sig):
            ok = goal.signer == self.agent and self._synth(goal.body)
        elif isinstance(goal, Hash):
            ok = self.theory.dolev_yao and self._synth(goal.body)
        elif isinstance(goal, Enc):
            ok = self.theory.dolev_yao and self._synth(goal.body) and self._synth(goal.key)
        else:
            ok = False
        self._memo[goal] = ok
        return ok

    def derives(self, goal: Message) -> bool:
        return self._synth(goal)

    def derives_all(self, goals: Iterable[Message]) -> bool:
        return all(self._synth(g) for g in goals)


@lru_cache(maxsize=65536)
def knowledge(agent: str, base: frozenset, theory: TermTheory = BASE) -> Knowledge:
    return Knowledge(agent, base, theory)


def analysis_set(agent: str, base: Iterable[Message], theory: TermTheory = BASE) -> frozenset:
    return knowledge(agent, frozenset(base), theory).analysis


def derives(agent: str, base: Iterable[Message], goal: Message,
            theory: TermTheory = BASE) -> bool:
    """True iff `goal` lies in clo_agent(base), i.e. base ⊩_agent goal."""
    return knowledge(agent, frozenset(base), theory).derives(goal)


@dataclass(frozen=True)
class DerivationQuery:
    agent: str
    base: frozenset
    goal: Message
    theory: TermTheory = BASE

    def decide(self) -> bool:
        return derives(self.agent, self.base, self.goal, self.theory)


def closure_subset(agent: str, s_base: Iterable[Message], t_base: Iterable[Message],
                   theory: TermTheory = BASE) -> bool:
    """clo_agent(s_base) ⊆ clo_agent(t_base), decided on the generators of s_base."""
    return knowledge(agent, frozenset(t_base), theory).derives_all(s_base)


def closure_equal(agent: str, s_base, t_base, theory: TermTheory = BASE) -> bool:
    return (closure_subset(agent, s_base, t_base, theory)
            and closure_subset(agent, t_base, s_base, theory))


def is_consistent(agent: str, state_base: Iterable[Message], data: Iterable[Message]) -> bool:
    """Membership in Con_a^s.

    The full message set is closed under clo_a^s, so every finite set of
    messages is a finite subset of a fixed point and thus consistent.
    """
    return True


@dataclass
class ScottReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def scott_check(agent: str, state_base: Iterable[Message], samples,
                theory: TermTheory = BASE) -> ScottReport:
    """Check the information-system properties on sampled (D, M) pairs.

    Derivation is taken relative to the state: D ⊩ M means
    M ∈ clo_a(state_base ∪ D).
    """
    state_base = frozenset(state_base)
    report = ScottReport()

    def der(d, m):
        return derives(agent, state_base | frozenset(d), m, theory)

    def fail(prop, d, m, extra=""):
        report.violations.append({"property": prop, "data": sorted(map(str, d)),
                                  "message": str(m), "detail": extra})

    for d, m in samples:
        d = frozenset(d)
        report.checked += 1
        if not is_consistent(agent, state_base, {m}):
            fail("singleton-consistency", d, m)
        for x in d:
            if not der(d, x):
                fail("reflexivity", d, m, str(x))
        if not is_consistent(agent, state_base, d):
            continue
        for x in d:
            if not is_consistent(agent, state_base, d - {x}):
                fail("downward-closure", d, m, str(x))
        if der(d, m):
            if not is_consistent(agent, state_base, d | {m}):
                fail("extension", d, m)
            # cut, in the set form: every element of D ∪ {M} is derivable
            # from D, so anything derivable from D ∪ {M} is derivable from D
            for y in d | {m}:
                if der(d | {m}, y) and not der(d, y):
                    fail("cut", d, m, str(y))
            ext = knowledge(agent, state_base | d | {m}, theory)
            for y in ext.analysis:
                if not der(d, y):
                    fail("cut", d, m, str(y))
    return report

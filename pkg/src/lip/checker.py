"""Satisfaction on finite models.

Formulas are evaluated bottom-up to the bitmask of states satisfying
them.  ``Proves`` holds at a state when all of its successors satisfy the
goal; successors come from persistent accessibility or, in instant mode,
from the information-token relations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (And, CommonKnows, Knows, KnowsThat, Not, PropAtom, Proves,
                       expand_macros, parse_formula)
from .model import InstantFamily, Model, RelationFamily, as_pairs, build_relations

MODES = ("persistent", "instant")


class EvalError(ValueError):
    pass


def box(rows: tuple, mask: int) -> int:
    """States all of whose `rows`-successors lie in `mask`."""
    out = 0
    for i, row in enumerate(rows):
        if row & ~mask == 0:
            out |= 1 << i
    return out


class Evaluator:
    """Memoising evaluator for one model in one mode."""

    def __init__(self, model: Model, rels: RelationFamily | None = None,
                 mode: str = "persistent"):
        if mode not in MODES:
            raise EvalError(f"unknown mode {mode!r} (expected persistent or instant)")
        self.model = model
        self.rels = rels if rels is not None else build_relations(model)
        self.mode = mode
        self.instant = InstantFamily(self.rels) if mode == "instant" else None
        self.designated = model.agents[0]
        self._memo: dict = {}

    def _agent(self, a: str) -> str:
        if a not in self.model.agents:
            raise EvalError(f"unknown agent {a!r}")
        return a

    def _community(self, c) -> frozenset:
        for a in c:
            self._agent(a)
        return frozenset(c)

    def successors(self, msg, agent: str, community) -> tuple:
        self._agent(agent)
        community = self._community(community)
        if self.instant is not None:
            return self.instant.successors(msg, agent, community)
        return self.rels.successors(msg, agent, community)

    def proves_mask(self, f: Proves) -> int:
        return box(self.successors(f.proof, f.verifier, f.community), self.mask(f.goal))

    def mask(self, f) -> int:
        hit = self._memo.get(f)
        if hit is not None:
            return hit
        t = type(f)
        if t is PropAtom:
            try:
                out = self.model.atom_mask(f)
            except KeyError as e:
                raise EvalError(e.args[0]) from None
        elif t is Knows:
            out = self.model.knows_mask(self._agent(f.agent), f.msg)
        elif t is Not:
            out = self.model.full & ~self.mask(f.body)
        elif t is And:
            out = self.mask(f.left) & self.mask(f.right)
        elif t is Proves:
            out = self.proves_mask(f)
        elif t is KnowsThat:
            out = box(self.rels.eq[self._agent(f.agent)], self.mask(f.body))
        elif t is CommonKnows:
            out = box(self.rels.eq_c(self._community(f.community)), self.mask(f.body))
        else:
            out = self.mask(expand_macros(f, self.designated))
        self._memo[f] = out
        return out

    def holds(self, state, f) -> bool:
        return bool(self.mask(f) >> self.model.index(state) & 1)

    def globally(self, f) -> bool:
        return self.mask(f) == self.model.full

    def states(self, f) -> list:
        m = self.mask(f)
        return [s for i, s in enumerate(self.model.states) if m >> i & 1]


def evaluate(model: Model, rels: RelationFamily | None, state, f,
             mode: str = "persistent") -> bool:
    try:
        model.index(state)
    except KeyError as e:
        raise EvalError(e.args[0]) from None
    return Evaluator(model, rels, mode).holds(state, f)


def denotation_successors(model: Model, rels: RelationFamily | None, state, msg,
                          agent: str, community) -> frozenset:
    """The R^M_{a,C}-successors of `state`; equal sets mean equal proof goals there."""
    rels = rels if rels is not None else build_relations(model)
    row = rels.successors(msg, agent, frozenset(community))[model.index(state)]
    return frozenset(s for i, s in enumerate(model.states) if row >> i & 1)


def parse_query(model: Model, text: str):
    """A formula over the model's agents; K[a](..) and CK[{..}](..) are allowed."""
    return parse_formula(text, model.agents, model.theory, designated=model.agents[0],
                         allow_epistemic=True)


@dataclass(frozen=True)
class Query:
    formula: object
    state: object = None
    mode: str = "persistent"

    def answer(self, model: Model, rels: RelationFamily | None = None) -> bool:
        """Satisfaction at `state`, or global truth when no state is given."""
        ev = Evaluator(model, rels, self.mode)
        if self.state is None:
            return ev.globally(self.formula)
        try:
            model.index(self.state)
        except KeyError as e:
            raise EvalError(e.args[0]) from None
        return ev.holds(self.state, self.formula)


def accessibility_pairs(model: Model, rels: RelationFamily, msg, agent, community) -> set:
    return as_pairs(model, rels.successors(msg, agent, frozenset(community)))

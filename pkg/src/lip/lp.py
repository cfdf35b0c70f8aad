"""Logic of Proofs syntax and its homomorphic translation into LiP.

LP text uses lower-case proof variables, ``#a`` proof constants, ``+`` for
sum, ``*`` for application, ``!`` for the proof checker and ``t:F`` for
proof assertions; propositional letters are upper-case.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import And, Not, PropAtom, Proves, implies
from .lexer import ParseError, TokenStream
from .terms import Agent, Atom, Pair, Sig


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Sum:
    left: object
    right: object


@dataclass(frozen=True)
class App:
    left: object
    right: object


@dataclass(frozen=True)
class Bang:
    body: object


@dataclass(frozen=True)
class Letter:
    name: str


@dataclass(frozen=True)
class LNot:
    body: object


@dataclass(frozen=True)
class LAnd:
    left: object
    right: object


@dataclass(frozen=True)
class LImp:
    left: object
    right: object


@dataclass(frozen=True)
class ProofOf:
    term: object
    formula: object


class _LPParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)

    def formula(self):
        left = self.conjunction()
        if self.ts.accept("->"):
            return LImp(left, self.formula())
        return left

    def conjunction(self):
        left = self.unary()
        if self.ts.accept("/\\"):
            return LAnd(left, self.conjunction())
        return left

    def unary(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("~"):
            return LNot(self.unary())
        if tok.kind == "upper":
            ts.next()
            return Letter(tok.text)
        if tok.text == "(":
            # either a parenthesised formula or a parenthesised proof term
            start = ts.i
            try:
                term = self.term()
                if ts.at(":"):
                    return self._assertion(term)
            except ParseError:
                pass
            ts.i = start
            ts.next()
            f = self.formula()
            ts.expect(")")
            return f
        if tok.kind == "lower" or tok.text in ("!", "#"):
            return self._assertion(self.term())
        shown = tok.text or "end of input"
        raise ParseError(f"expected an LP formula but found {shown!r}", tok.pos)

    def _assertion(self, term):
        self.ts.expect(":")
        return ProofOf(term, self.unary())

    def term(self):
        left = self.product()
        if self.ts.accept("+"):
            return Sum(left, self.term())
        return left

    def product(self):
        left = self.atom()
        while self.ts.accept("*"):
            left = App(left, self.atom())
        return left

    def atom(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("!"):
            return Bang(self.atom())
        if ts.accept("#"):
            return Const(ts.expect_kind("lower", "a proof constant").text)
        if tok.kind == "lower":
            ts.next()
            return Var(tok.text)
        if ts.accept("("):
            t = self.term()
            ts.expect(")")
            return t
        shown = tok.text or "end of input"
        raise ParseError(f"expected a proof term but found {shown!r}", tok.pos)


def parse_lp(text: str):
    p = _LPParser(text)
    f = p.formula()
    p.ts.expect_end()
    return f


def translate_term(t, agent: str):
    if isinstance(t, Var):
        return Atom(t.name)
    if isinstance(t, Const):
        if t.name != agent:
            raise ValueError(f"LP constant {t.name!r} is outside the society {{{agent}}}")
        return Agent(t.name)
    if isinstance(t, (Sum, App)):
        return Pair(translate_term(t.left, agent), translate_term(t.right, agent))
    if isinstance(t, Bang):
        return Sig(agent, translate_term(t.body, agent))
    raise TypeError(f"not an LP term: {t!r}")


def translate_lp(f, agent: str):
    """The homomorphism h into the singleton society {agent}."""
    if isinstance(f, str):
        f = parse_lp(f)
    if isinstance(f, Letter):
        return PropAtom(f.name)
    if isinstance(f, LNot):
        return Not(translate_lp(f.body, agent))
    if isinstance(f, LAnd):
        return And(translate_lp(f.left, agent), translate_lp(f.right, agent))
    if isinstance(f, LImp):
        return implies(translate_lp(f.left, agent), translate_lp(f.right, agent))
    if isinstance(f, ProofOf):
        return Proves(translate_term(f.term, agent), translate_lp(f.formula, agent),
                      agent, frozenset())
    raise TypeError(f"not an LP formula: {f!r}")

"""Formulas: core connectives, macros, parsing and printing.

The core language has propositional atoms, individual-knowledge atoms
``k[a](M)``, negation, conjunction and the proof modality
``M :[a,{C}] f``.  Everything else (true, implication, refutation, ...) is
a macro that expands into the core.  ``K[a](f)`` and ``CK[{..}](f)`` are
evaluation-only operators and never reach the proof kernel.
"""

from __future__ import annotations

from typing import Iterable

from .lexer import ParseError
from .terms import (BASE, Agent, MessageParser, TermTheory, format_community,
                    format_message, node)


# -- core nodes --------------------------------------------------------------

@node
class PropAtom:
    name: str
    args: tuple = ()


@node
class Knows:
    agent: str
    msg: object


@node
class Not:
    body: object


@node
class And:
    left: object
    right: object


@node
class Proves:
    proof: object
    goal: object
    verifier: str
    community: frozenset


@node
class KnowsThat:
    """K_a f: f holds at every state `agent` cannot tell apart from this one."""

    agent: str
    body: object


@node
class CommonKnows:
    community: frozenset
    body: object


# -- surface macros ------------------------------------------------------------

@node
class TrueF:
    pass


@node
class FalseF:
    pass


@node
class Or:
    left: object
    right: object


@node
class Implies:
    left: object
    right: object


@node
class Iff:
    left: object
    right: object


@node
class Refutes:
    proof: object
    goal: object
    verifier: str
    community: frozenset


@node
class Diamond:
    proof: object
    goal: object
    verifier: str
    community: frozenset


@node
class Decides:
    proof: object
    goal: object
    verifier: str
    community: frozenset


@node
class Undecides:
    proof: object
    goal: object
    verifier: str
    community: frozenset


# -- pattern markers (used when a script is read schematically) -------------

@node
class MetaVar:
    """Placeholder for a message or formula parameter in pattern mode."""

    name: str
    kind: str

    def __str__(self):
        return self.name


@node
class BigAnd:
    """Conjunction of `body` over a community that still contains unknowns."""

    var: str
    community: frozenset
    body: object


CORE_TYPES = (PropAtom, Knows, Not, And, Proves)
EPISTEMIC_TYPES = (KnowsThat, CommonKnows)
PROOF_MACROS = (Refutes, Diamond, Decides, Undecides)


# -- constructors -----------------------------------------------------------------

def true_(designated: str):
    return Knows(designated, Agent(designated))


def false_(designated: str):
    return Not(true_(designated))


def or_(x, y):
    return Not(And(Not(x), Not(y)))


def implies(x, y):
    return or_(Not(x), y)


def iff(x, y):
    return And(implies(x, y), implies(y, x))


def conjoin(fs: Iterable):
    """Right-nested conjunction of a nonempty sequence."""
    items = list(fs)
    if not items:
        raise ValueError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def expand_macros(f, designated: str):
    """Rewrite every macro into core connectives (idempotent on core formulas)."""
    ex = lambda g: expand_macros(g, designated)  # noqa: E731
    t = type(f)
    if t is PropAtom or t is Knows or t is MetaVar:
        return f
    if t is Not:
        return Not(ex(f.body))
    if t is And:
        return And(ex(f.left), ex(f.right))
    if t is Proves:
        return Proves(f.proof, ex(f.goal), f.verifier, f.community)
    if t is KnowsThat:
        return KnowsThat(f.agent, ex(f.body))
    if t is CommonKnows:
        return CommonKnows(f.community, ex(f.body))
    if t is TrueF:
        return true_(designated)
    if t is FalseF:
        return false_(designated)
    if t is Or:
        return or_(ex(f.left), ex(f.right))
    if t is Implies:
        return implies(ex(f.left), ex(f.right))
    if t is Iff:
        return iff(ex(f.left), ex(f.right))
    if t in PROOF_MACROS:
        goal = ex(f.goal)
        proof = Proves(f.proof, goal, f.verifier, f.community)
        refute = Proves(f.proof, Not(goal), f.verifier, f.community)
        if t is Refutes:
            return refute
        if t is Diamond:
            return Not(refute)
        if t is Decides:
            return or_(proof, refute)
        return Not(or_(proof, refute))
    if t is BigAnd:
        return BigAnd(f.var, f.community, ex(f.body))
    raise TypeError(f"not a formula: {f!r}")


def is_core(f) -> bool:
    t = type(f)
    if t is PropAtom or t is Knows:
        return True
    if t is Not:
        return is_core(f.body)
    if t is And:
        return is_core(f.left) and is_core(f.right)
    if t is Proves:
        return is_core(f.goal)
    return False


def subformulas(f):
    """Pre-order walk over the formula tree (messages are not entered)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        t = type(g)
        if t is Not or t is KnowsThat or t is CommonKnows:
            stack.append(g.body)
        elif t is And:
            stack.append(g.right)
            stack.append(g.left)
        elif t is Proves:
            stack.append(g.goal)


def formula_messages(f) -> set:
    """Messages occurring as proofs or knowledge objects in `f`."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, Knows):
            out.add(g.msg)
        elif isinstance(g, Proves):
            out.add(g.proof)
    return out


def formula_agents(f) -> set:
    from .terms import agents_of

    out = set()
    for g in subformulas(f):
        t = type(g)
        if t is Knows:
            out.add(g.agent)
            out |= agents_of(g.msg)
        elif t is Proves:
            out.add(g.verifier)
            out |= g.community
            out |= agents_of(g.proof)
        elif t is PropAtom:
            out.update(g.args)
        elif t is KnowsThat:
            out.add(g.agent)
        elif t is CommonKnows:
            out |= g.community
    return out


def modal_depth(f) -> int:
    t = type(f)
    if t is Not or t is KnowsThat or t is CommonKnows:
        return modal_depth(f.body) + (t is not Not)
    if t is And:
        return max(modal_depth(f.left), modal_depth(f.right))
    if t is Proves:
        return 1 + modal_depth(f.goal)
    return 0


# -- printing ---------------------------------------------------------------------

def as_implication(f):
    """(x, y) when `f` is the expansion of x -> y, else None."""
    if type(f) is Not and type(f.body) is And:
        left, right = f.body.left, f.body.right
        if type(left) is Not and type(right) is Not:
            if type(left.body) is Not:
                return left.body.body, right.body
    return None


def as_disjunction(f):
    if type(f) is Not and type(f.body) is And:
        left, right = f.body.left, f.body.right
        if type(left) is Not and type(right) is Not:
            return left.body, right.body
    return None


def resugar(f, designated: str | None = None):
    """Inverse of macro expansion for the propositional connectives."""
    rs = lambda g: resugar(g, designated)  # noqa: E731
    t = type(f)
    if t is Knows:
        if designated is not None and f.agent == designated and f.msg == Agent(designated):
            return TrueF()
        return f
    if t is Not:
        imp = as_implication(f)
        if imp is not None:
            return Implies(rs(imp[0]), rs(imp[1]))
        dis = as_disjunction(f)
        if dis is not None:
            return Or(rs(dis[0]), rs(dis[1]))
        body = rs(f.body)
        if type(body) is TrueF:
            return FalseF()
        return Not(body)
    if t is And:
        fw, bw = as_implication(f.left), as_implication(f.right)
        if fw is not None and bw is not None and fw == (bw[1], bw[0]):
            return Iff(rs(fw[0]), rs(fw[1]))
        return And(rs(f.left), rs(f.right))
    if t is Proves:
        return Proves(f.proof, rs(f.goal), f.verifier, f.community)
    if t is KnowsThat:
        return KnowsThat(f.agent, rs(f.body))
    if t is CommonKnows:
        return CommonKnows(f.community, rs(f.body))
    if t is BigAnd:
        return BigAnd(f.var, f.community, rs(f.body))
    return f


_LEVEL = {Iff: 0, Implies: 1, Or: 2, And: 3}
_OP = {Iff: "<->", Implies: "->", Or: "\\/", And: "/\\"}


def _show(f, level: int) -> str:
    t = type(f)
    if t in _OP:
        mine = _LEVEL[t]
        if t is Iff:
            text = f"{_show(f.left, 1)} <-> {_show(f.right, 1)}"
        else:
            text = f"{_show(f.left, mine + 1)} {_OP[t]} {_show(f.right, mine)}"
        return f"({text})" if level > mine else text
    if t is Not:
        return "~" + _show(f.body, 4)
    if t is PropAtom:
        return f.name + (f"({','.join(f.args)})" if f.args else "")
    if t is Knows:
        return f"k[{f.agent}]({format_message(f.msg)})"
    if t is TrueF:
        return "true"
    if t is FalseF:
        return "false"
    if t is Proves:
        return (f"{format_message(f.proof)} :[{f.verifier},{format_community(f.community)}] "
                f"{_show(f.goal, 4)}")
    if t in PROOF_MACROS:
        return (f"{t.__name__.lower()}[{f.verifier},{format_community(f.community)}]"
                f"({format_message(f.proof)}, {_show(f.goal, 0)})")
    if t is KnowsThat:
        return f"K[{f.agent}]({_show(f.body, 0)})"
    if t is CommonKnows:
        return f"CK[{format_community(f.community)}]({_show(f.body, 0)})"
    if t is MetaVar:
        return f.name
    if t is BigAnd:
        return f"all[{f.var} : {format_community(f.community)}] {_show(f.body, 4)}"
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f, designated: str | None = None, sugar: bool = True) -> str:
    """Render `f`; with `sugar` the propositional macros are folded back."""
    return _show(resugar(f, designated) if sugar else f, 0)


# -- parsing ----------------------------------------------------------------------

_MACRO_KEYWORDS = {"refutes": Refutes, "diamond": Diamond, "decides": Decides,
                   "undecides": Undecides}


class FormulaParser(MessageParser):
    def __init__(self, text: str, agents: Iterable[str], theory: TermTheory = BASE,
                 env: dict | None = None, allow_epistemic: bool = False,
                 allow_atoms: bool = True):
        super().__init__(text, agents, theory, env, allow_atoms)
        self.allow_epistemic = allow_epistemic

    def formula(self):
        left = self.implication()
        if self.ts.accept("<->"):
            return Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.ts.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        if self.ts.accept("\\/"):
            return Or(left, self.disjunction())
        return left

    def conjunction(self):
        left = self.unary()
        if self.ts.accept("/\\"):
            return And(left, self.conjunction())
        return left

    def unary(self):
        ts = self.ts
        tok = ts.peek()
        if ts.accept("~"):
            return Not(self.unary())
        if ts.accept("("):
            f = self.formula()
            ts.expect(")")
            return f
        if tok.kind == "lower":
            word = tok.text
            if word == "k" and ts.at("[", 1):
                ts.next()
                ts.expect("[")
                agent = self.agent_name()
                ts.expect("]")
                ts.expect("(")
                msg = self.message()
                ts.expect(")")
                return Knows(agent, msg)
            if word == "true" and not ts.at(":[", 1):
                ts.next()
                return TrueF()
            if word == "false" and not ts.at(":[", 1):
                ts.next()
                return FalseF()
            if word in _MACRO_KEYWORDS and ts.at("[", 1):
                return self._proof_macro()
            if word == "all" and ts.at("[", 1):
                return self._big_and()
            if ts.at("(", 1) and word not in ("hash",):
                return self._prop_atom()
        if tok.kind == "upper":
            if tok.text in ("K", "CK") and ts.at("[", 1) and tok.text not in self.env:
                return self._epistemic()
            entry = self.env.get(tok.text)
            if entry is not None and entry[0] == "formula":
                ts.next()
                return entry[1]
            if entry is None and not ts.at(":[", 1):
                ts.next()
                return PropAtom(tok.text)
        if tok.kind in ("lower", "upper") or tok.text == "<":
            start = ts.i
            try:
                msg = self.message()
            except ParseError:
                msg = None
            if msg is not None and ts.at(":["):
                return self._proves_tail(msg)
            ts.i = start
            if tok.kind == "lower":
                ts.next()
                return PropAtom(tok.text)
            if msg is None:
                self.message()  # re-raise the message error
            raise ParseError(f"expected ':[' after message {format_message(msg)}",
                             ts.peek().pos)
        shown = tok.text or "end of input"
        raise ParseError(f"expected a formula but found {shown!r}", tok.pos)

    def _proves_tail(self, msg):
        ts = self.ts
        ts.expect(":[")
        verifier = self.agent_name()
        ts.expect(",")
        community = self.community()
        ts.expect("]")
        return Proves(msg, self.unary(), verifier, community)

    def _prop_atom(self):
        ts = self.ts
        name = ts.next().text
        ts.expect("(")
        args = []
        if not ts.at(")"):
            args.append(self.agent_name())
            while ts.accept(","):
                args.append(self.agent_name())
        ts.expect(")")
        return PropAtom(name, tuple(args))

    def _proof_macro(self):
        ts = self.ts
        cls = _MACRO_KEYWORDS[ts.next().text]
        ts.expect("[")
        verifier = self.agent_name()
        ts.expect(",")
        community = self.community()
        ts.expect("]")
        ts.expect("(")
        msg = self.message()
        ts.expect(",")
        goal = self.formula()
        ts.expect(")")
        return cls(msg, goal, verifier, community)

    def _epistemic(self):
        ts = self.ts
        tok = ts.next()
        if not self.allow_epistemic:
            raise ParseError(f"{tok.text} is only available in model-checking queries", tok.pos)
        ts.expect("[")
        if tok.text == "K":
            agent = self.agent_name()
            ts.expect("]")
        else:
            community = self.community()
            ts.expect("]")
        ts.expect("(")
        body = self.formula()
        ts.expect(")")
        if tok.text == "K":
            return KnowsThat(agent, body)
        return CommonKnows(community, body)

    def _big_and(self):
        """``all[X : {..}] body``: conjunction over the members in sorted order."""
        ts = self.ts
        ts.next()
        ts.expect("[")
        var = ts.expect_kind("upper", "a bound agent variable")
        ts.expect(":")
        community = self.community()
        ts.expect("]")
        start = ts.i
        saved = self.env.get(var.text)
        try:
            if any(_is_marker(x) for x in community):
                self.env[var.text] = ("agent", "?" + var.text)
                return BigAnd("?" + var.text, community, self.unary())
            if not community:
                raise ParseError("conjunction over an empty community", var.pos)
            parts = []
            for member in sorted(community):
                ts.i = start
                self.env[var.text] = ("agent", member)
                parts.append(self.unary())
            return conjoin(parts)
        finally:
            if saved is None:
                self.env.pop(var.text, None)
            else:
                self.env[var.text] = saved


def _is_marker(name: str) -> bool:
    return name[:1] in ("?", "*")


def parse_formula(text: str, agents: Iterable[str], theory: TermTheory = BASE,
                  designated: str | None = None, env: dict | None = None,
                  expand: bool = True, allow_epistemic: bool = False):
    """Parse a formula; by default macros are expanded into the core language.

    `designated` is the agent used for ``true``; it defaults to the
    alphabetically first agent.
    """
    agents = frozenset(agents)
    p = FormulaParser(text, agents, theory, env, allow_epistemic)
    f = p.formula()
    p.ts.expect_end()
    if not expand:
        return f
    if designated is None:
        if not agents:
            raise ParseError("no agents declared", 0)
        designated = min(agents)
    return expand_macros(f, designated)

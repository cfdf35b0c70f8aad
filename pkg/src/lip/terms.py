"""Message terms: constructors, parsing, printing and the term theories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .lexer import ParseError, TokenStream


def node(cls):
    """Frozen slotted dataclass with a cached structural hash.

    Terms and formulas are hashed and compared constantly (memo tables,
    state sets), so the hash is computed once and unequal hashes
    short-circuit equality.
    """
    own = cls.__dict__.get("__annotations__", {})
    names = tuple(own)
    tag = cls.__name__
    cls.__annotations__ = dict(own, _h=int)
    cls._h = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((tag,) + tuple(getattr(self, n) for n in names)))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._h != self._h:
            return False
        return all(getattr(self, n) == getattr(other, n) for n in names)

    def __reduce__(self):
        # rebuild on unpickling: string hashes differ between processes
        return type(self), tuple(getattr(self, n) for n in names)

    cls.__post_init__ = __post_init__
    cls.__reduce__ = __reduce__
    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    cls._fields = names
    return dataclass(frozen=True, slots=True, eq=False)(cls)


@node
class Agent:
    name: str

    def __str__(self):
        return format_message(self)


@node
class Atom:
    name: str

    def __str__(self):
        return format_message(self)


@node
class Sig:
    signer: str
    body: "Message"

    def __str__(self):
        return format_message(self)


@node
class Pair:
    left: "Message"
    right: "Message"

    def __str__(self):
        return format_message(self)


@node
class Hash:
    body: "Message"

    def __str__(self):
        return format_message(self)


@node
class Enc:
    """Ciphertext of `body` under `key`; written ``enc[key](body)``."""

    body: "Message"
    key: "Message"

    def __str__(self):
        return format_message(self)


Message = Union[Agent, Atom, Sig, Pair, Hash, Enc]
MESSAGE_TYPES = (Agent, Atom, Sig, Pair, Hash, Enc)


@dataclass(frozen=True)
class TermTheory:
    """A closure-rule set for data derivation.

    The base theory has pairing, unpairing, personal signature synthesis
    and universal signature analysis.  The Dolev-Yao theory adds hashing,
    encryption and decryption.
    """

    name: str
    rules: frozenset

    @property
    def dolev_yao(self) -> bool:
        return "decrypt" in self.rules


BASE = TermTheory("base", frozenset({"pair", "unpair", "sign", "unsign"}))
DY = TermTheory(
    "dolev-yao",
    frozenset({"pair", "unpair", "sign", "unsign", "hash", "encrypt", "decrypt"}),
)


def term_theory(name: str) -> TermTheory:
    if name == "base":
        return BASE
    if name in ("dy", "dolev-yao"):
        return DY
    raise ValueError(f"unknown term theory {name!r}")


def pair_all(messages: Iterable[Message]) -> Message:
    """Right-nested pair of the given messages (at least one)."""
    items = list(messages)
    if not items:
        raise ValueError("cannot pair an empty sequence")
    out = items[-1]
    for m in reversed(items[:-1]):
        out = Pair(m, out)
    return out


def subterms(m: Message) -> set:
    """`m` and all of its strict subterms; a signature contributes its signer."""
    out: set = set()
    stack = [m]
    while stack:
        t = stack.pop()
        if t in out:
            continue
        out.add(t)
        if isinstance(t, Sig):
            stack.append(t.body)
            stack.append(Agent(t.signer))
        elif isinstance(t, Pair):
            stack.append(t.left)
            stack.append(t.right)
        elif isinstance(t, Hash):
            stack.append(t.body)
        elif isinstance(t, Enc):
            stack.append(t.body)
            stack.append(t.key)
    return out


def depth(m: Message) -> int:
    """Constructor depth; names and atoms have depth 0."""
    if isinstance(m, (Agent, Atom)):
        return 0
    if isinstance(m, (Sig, Hash)):
        return 1 + depth(m.body)
    if isinstance(m, Pair):
        return 1 + max(depth(m.left), depth(m.right))
    return 1 + max(depth(m.body), depth(m.key))


def agents_of(m: Message) -> set:
    return {t.name for t in subterms(m) if isinstance(t, Agent)}


def atoms_of(m: Message) -> set:
    return {t.name for t in subterms(m) if isinstance(t, Atom)}


def uses_dolev_yao(m: Message) -> bool:
    return any(isinstance(t, (Hash, Enc)) for t in subterms(m))


def format_message(m) -> str:
    if isinstance(m, (Agent, Atom)):
        return m.name
    if isinstance(m, Sig):
        return f"sig[{m.signer}]({format_message(m.body)})"
    if isinstance(m, Pair):
        items = [m.left]
        rest = m.right
        while isinstance(rest, Pair):
            items.append(rest.left)
            rest = rest.right
        items.append(rest)
        return "<" + ",".join(format_message(x) for x in items) + ">"
    if isinstance(m, Hash):
        return f"hash({format_message(m.body)})"
    if isinstance(m, Enc):
        return f"enc[{format_message(m.key)}]({format_message(m.body)})"
    # pattern variables and other extensions print themselves
    return str(m)


def format_community(c) -> str:
    return "{" + ",".join(sorted(c)) + "}"


# -- parsing ---------------------------------------------------------------

MESSAGE_KEYWORDS = {"sig", "hash", "enc"}


class MessageParser:
    """Recursive-descent parser for messages and communities.

    `env` maps upper-case metavariable names to ``(kind, value)`` where kind
    is one of 'msg', 'formula', 'agent', 'community'.
    """

    def __init__(self, text: str, agents: Iterable[str], theory: TermTheory = BASE,
                 env: dict | None = None, allow_atoms: bool = True):
        self.ts = TokenStream(text)
        self.agents = frozenset(agents)
        self.theory = theory
        self.env = dict(env or {})
        self.allow_atoms = allow_atoms

    # metavariables
    def lookup(self, tok, *kinds):
        entry = self.env.get(tok.text)
        if entry is None:
            raise ParseError(f"unknown metavariable {tok.text!r}", tok.pos)
        kind, value = entry
        if kinds and kind not in kinds:
            raise ParseError(
                f"metavariable {tok.text!r} is a {kind}, expected {' or '.join(kinds)}",
                tok.pos)
        return kind, value

    def agent_name(self) -> str:
        tok = self.ts.peek()
        if tok.kind == "upper":
            self.ts.next()
            return self.lookup(tok, "agent")[1]
        tok = self.ts.expect_kind("lower", "an agent name")
        if tok.text not in self.agents:
            raise ParseError(f"unknown agent {tok.text!r}", tok.pos)
        return tok.text

    def community(self) -> frozenset:
        self.ts.expect("{")
        members: set = set()
        if not self.ts.at("}"):
            while True:
                tok = self.ts.peek()
                if tok.kind == "upper":
                    self.ts.next()
                    kind, value = self.lookup(tok, "agent", "community")
                    if kind == "agent":
                        members.add(value)
                    else:
                        members |= value
                else:
                    members.add(self.agent_name())
                if not self.ts.accept(","):
                    break
        self.ts.expect("}")
        return frozenset(members)

    def message(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "lower" and tok.text in MESSAGE_KEYWORDS and ts.at("[", 1) or \
                tok.kind == "lower" and tok.text == "hash" and ts.at("(", 1):
            return self._constructor()
        if tok.kind == "lower":
            ts.next()
            if tok.text in self.agents:
                return Agent(tok.text)
            if not self.allow_atoms:
                raise ParseError(f"unknown agent {tok.text!r} (atoms are not allowed here)",
                                 tok.pos)
            return Atom(tok.text)
        if tok.kind == "upper":
            ts.next()
            kind, value = self.lookup(tok, "msg", "agent")
            return Agent(value) if kind == "agent" else value
        if ts.accept("<"):
            items = [self.message()]
            while ts.accept(","):
                items.append(self.message())
            ts.expect(">")
            if len(items) < 2:
                raise ParseError("a pair needs two components", tok.pos)
            return pair_all(items)
        shown = tok.text or "end of input"
        raise ParseError(f"expected a message but found {shown!r}", tok.pos)

    def _constructor(self):
        ts = self.ts
        tok = ts.next()
        if tok.text == "sig":
            ts.expect("[")
            signer = self.agent_name()
            ts.expect("]")
            ts.expect("(")
            body = self.message()
            ts.expect(")")
            return Sig(signer, body)
        if not self.theory.dolev_yao:
            raise ParseError(f"constructor not in theory: {tok.text}", tok.pos)
        if tok.text == "hash":
            ts.expect("(")
            body = self.message()
            ts.expect(")")
            return Hash(body)
        ts.expect("[")
        key = self.message()
        ts.expect("]")
        ts.expect("(")
        body = self.message()
        ts.expect(")")
        return Enc(body, key)


def parse_message(text: str, theory: TermTheory = BASE, agents: Iterable[str] = (),
                  env: dict | None = None) -> Message:
    p = MessageParser(text, agents, theory, env)
    m = p.message()
    p.ts.expect_end()
    return m


def parse_community(text: str, agents: Iterable[str], env: dict | None = None) -> frozenset:
    p = MessageParser(text, agents, BASE, env)
    c = p.community()
    p.ts.expect_end()
    return c


def parse_message_list(text: str, theory: TermTheory, agents: Iterable[str]) -> list:
    """Comma- or newline-separated messages, as used by ``.terms`` files."""
    p = MessageParser(text, agents, theory)
    out = []
    if p.ts.peek().kind == "end":
        return out
    while True:
        out.append(p.message())
        if p.ts.peek().kind == "end":
            break
        p.ts.accept(",")
        if p.ts.peek().kind == "end":
            break
    return out

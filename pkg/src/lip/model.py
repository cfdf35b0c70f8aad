"""Finite Kripke models: raw data per agent and state, and the relations built on it.

Relations are stored as tuples of bitmask rows: ``rows[i]`` has bit ``j``
set iff state ``i`` is related to state ``j``.  States are indexed in
declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .derivation import analysis_set, knowledge
from .formulas import PropAtom
from .lexer import ParseError, TokenStream
from .terms import (BASE, Agent, MessageParser, Pair, Sig, TermTheory,
                    format_message, pair_all, subterms, term_theory)


class ModelError(ValueError):
    """A malformed or ill-formed model; `line`/`col` are set for syntax errors."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        self.bare = message
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


class UniverseBudgetError(ValueError):
    pass


def theory_label(theory: TermTheory) -> str:
    return "dy" if theory.dolev_yao else "base"


def atom_label(p: PropAtom) -> str:
    return f"{p.name}({', '.join(p.args)})" if p.args else p.name


@dataclass(frozen=True, eq=False)
class Model:
    agents: tuple
    states: tuple
    msgs: dict  # (agent, state) -> frozenset of messages
    valuation: dict  # PropAtom -> frozenset of states
    theory: TermTheory = BASE
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(set(self.agents))))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.agents == other.agents and self.states == other.states
                and self.theory == other.theory
                and self._normal_msgs() == other._normal_msgs()
                and self.valuation == other.valuation)

    def _normal_msgs(self) -> dict:
        return {k: v for k, v in self.msgs.items() if v}

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def full(self) -> int:
        return (1 << len(self.states)) - 1

    def index(self, state) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise KeyError(f"unknown state {state!r}") from None

    def data(self, agent: str, state) -> frozenset:
        return self.msgs.get((agent, state), frozenset())

    def knowledge(self, agent: str, state):
        return knowledge(agent, self.data(agent, state), self.theory)

    def knows(self, agent: str, state, msg) -> bool:
        return bool(self.knows_mask(agent, msg) >> self.index(state) & 1)

    def knows_mask(self, agent: str, msg) -> int:
        """States at which `agent` can derive `msg` from its raw data."""
        key = ("k", agent, msg)
        hit = self._cache.get(key)
        if hit is None:
            hit = 0
            for i, s in enumerate(self.states):
                if self.knowledge(agent, s).derives(msg):
                    hit |= 1 << i
            self._cache[key] = hit
        return hit

    def atom_mask(self, p: PropAtom) -> int:
        if p not in self.valuation:
            raise KeyError(f"unknown atom {atom_label(p)}")
        out = 0
        for s in self.valuation[p]:
            out |= 1 << self.index(s)
        return out

    def messages(self) -> set:
        """Every raw datum and all of its subterms, plus the agent names."""
        out = {Agent(a) for a in self.agents}
        for data in self.msgs.values():
            for m in data:
                out |= subterms(m)
        return out


# -- well-formedness ------------------------------------------------------------

def forgeries(model: Model) -> list:
    """(holder, state, signature) triples where a foreign signature is not derivable by its signer."""
    out = []
    for s in model.states:
        for a in model.agents:
            for t in sorted(analysis_set(a, model.data(a, s), model.theory), key=format_message):
                if isinstance(t, Sig) and t.signer != a:
                    if t.signer not in model.agents or not model.knows(t.signer, s, t):
                        out.append((a, s, t))
    return out


def validate(model: Model) -> Model:
    if not model.agents:
        raise ModelError("a model needs at least one agent")
    if not model.states:
        raise ModelError("a model needs at least one state")
    if len(set(model.states)) != len(model.states):
        raise ModelError("duplicate state id")
    for (a, s) in model.msgs:
        if a not in model.agents:
            raise ModelError(f"raw data for unknown agent {a!r}")
        model.index(s)
    for p, states in model.valuation.items():
        bad = set(p.args) - set(model.agents)
        if bad:
            raise ModelError(f"atom {atom_label(p)} names unknown agent(s) {sorted(bad)}")
        for s in states:
            model.index(s)
    bad = forgeries(model)
    if bad:
        a, s, t = bad[0]
        raise ModelError(f"signature {format_message(t)} is available to {a} at {s} "
                         f"but {t.signer} cannot derive it there (unforgeability)")
    return model


def repair_forgeries(agents, states, msgs: dict, theory: TermTheory) -> dict:
    """Give each signer the signatures others hold, until nothing changes."""
    msgs = dict(msgs)
    while True:
        changed = False
        for s in states:
            for a in agents:
                for t in analysis_set(a, msgs.get((a, s), ()), theory):
                    if isinstance(t, Sig) and t.signer != a and t.signer in agents:
                        base = msgs.get((t.signer, s), frozenset())
                        if not knowledge(t.signer, base, theory).derives(t):
                            msgs[(t.signer, s)] = base | {t}
                            changed = True
        if not changed:
            return msgs


# -- the .lipm format ----------------------------------------------------------

def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _strip_comments(text: str) -> str:
    # '#' starts a comment; blank it out so token positions stay put
    out = []
    for ln in text.split("\n"):
        cut = ln.find("#")
        out.append(ln if cut < 0 else ln[:cut] + " " * (len(ln) - cut))
    return "\n".join(out)


class _ModelParser:
    def __init__(self, text: str):
        self.ts = TokenStream(_strip_comments(text))
        self.agents: list | None = None
        self.theory = BASE
        self.states: list | None = None
        self.msgs: dict = {}
        self.valuation: dict = {}

    def fail(self, message: str, tok):
        raise ParseError(message, tok.pos)

    def ident(self, what: str) -> str:
        tok = self.ts.peek()
        if tok.kind not in ("lower", "upper", "int"):
            self.fail(f"expected {what} but found {tok.text or 'end of input'!r}", tok)
        self.ts.next()
        return tok.text

    def name_set(self, what: str) -> list:
        self.ts.expect("{")
        out = []
        if not self.ts.at("}"):
            while True:
                tok = self.ts.peek()
                name = self.ident(what)
                if name in out:
                    self.fail(f"duplicate {what} {name!r}", tok)
                out.append(name)
                if not self.ts.accept(","):
                    break
        self.ts.expect("}")
        return out

    def state(self) -> str:
        tok = self.ts.peek()
        name = self.ident("a state id")
        if self.states is None:
            self.fail("states must be declared before they are used", tok)
        if name not in self.states:
            self.fail(f"unknown state {name!r}", tok)
        return name

    def parse(self) -> Model:
        ts = self.ts
        while ts.peek().kind != "end":
            tok = ts.peek()
            word = self.ident("a declaration")
            if word == "agents":
                if self.agents is not None:
                    self.fail("agents declared twice", tok)
                self.agents = self.name_set("agent name")
                if not self.agents:
                    self.fail("a model needs at least one agent", tok)
            elif word == "theory":
                t = ts.peek()
                name = self.ident("a theory name")
                if name not in ("base", "dy"):
                    self.fail(f"unknown theory {name!r} (expected base or dy)", t)
                self.theory = term_theory(name)
            elif word == "states":
                if self.states is not None:
                    self.fail("states declared twice", tok)
                self.states = self.name_set("state id")
                if not self.states:
                    self.fail("a model needs at least one state", tok)
            elif word == "msgs":
                self.msgs_block(tok)
            elif word == "atoms":
                self.atoms_block(tok)
            else:
                self.fail(f"unknown declaration {word!r}", tok)
        if self.agents is None:
            raise ParseError("missing agents declaration", ts.peek().pos)
        if self.states is None:
            raise ParseError("missing states declaration", ts.peek().pos)
        return Model(tuple(self.agents), tuple(self.states), self.msgs, self.valuation,
                     self.theory)

    def msgs_block(self, tok):
        if self.agents is None:
            self.fail("agents must be declared before raw data", tok)
        t = self.ts.peek()
        agent = self.ident("an agent name")
        if agent not in self.agents:
            self.fail(f"unknown agent {agent!r}", t)
        state = self.state()
        if (agent, state) in self.msgs:
            self.fail(f"raw data for {agent} at {state} given twice", tok)
        mp = MessageParser("", self.agents, self.theory)
        mp.ts = self.ts
        self.ts.expect("{")
        data = set()
        if not self.ts.at("}"):
            while True:
                data.add(mp.message())
                if not self.ts.accept(","):
                    break
        self.ts.expect("}")
        self.msgs[(agent, state)] = frozenset(data)

    def atoms_block(self, tok):
        t = self.ts.peek()
        name = self.ident("an atom name")
        args = []
        if self.ts.accept("("):
            if not self.ts.at(")"):
                while True:
                    a = self.ts.peek()
                    arg = self.ident("an agent name")
                    if self.agents is None or arg not in self.agents:
                        self.fail(f"unknown agent {arg!r}", a)
                    args.append(arg)
                    if not self.ts.accept(","):
                        break
            self.ts.expect(")")
        atom = PropAtom(name, tuple(args))
        if atom in self.valuation:
            self.fail(f"atom {atom_label(atom)} given twice", t)
        states = []
        self.ts.expect("{")
        if not self.ts.at("}"):
            while True:
                states.append(self.state())
                if not self.ts.accept(","):
                    break
        self.ts.expect("}")
        self.valuation[atom] = frozenset(states)


def parse_model(text: str, check: bool = True) -> Model:
    """Parse ``.lipm`` text; syntax errors carry a line and column."""
    try:
        model = _ModelParser(text).parse()
    except ParseError as e:
        line, col = _line_col(text, e.pos or 0)
        raise ModelError(e.bare, line, col) from None
    return validate(model) if check else model


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def dump_model(model: Model) -> str:
    """Canonical text: agents sorted, states in order, data and atoms sorted."""
    lines = [f"agents {{{', '.join(model.agents)}}}",
             f"theory {theory_label(model.theory)}",
             f"states {{{', '.join(model.states)}}}"]
    for s in model.states:
        for a in model.agents:
            data = model.data(a, s)
            if data:
                body = ", ".join(sorted(format_message(m) for m in data))
                lines.append(f"msgs {a} {s} {{ {body} }}")
    for p in sorted(model.valuation, key=atom_label):
        members = [s for s in model.states if s in model.valuation[p]]
        lines.append(f"atoms {atom_label(p)} {{{', '.join(members)}}}")
    return "\n".join(lines) + "\n"


# -- relations ------------------------------------------------------------------

def star(rows: Iterable[int]) -> tuple:
    """Reflexive-transitive closure of a relation given as bitmask rows."""
    rows = [r | 1 << i for i, r in enumerate(rows)]
    n = len(rows)
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return tuple(rows)


def compose(r: tuple, q: tuple) -> tuple:
    """s (r;q) s'  iff  s r t and t q s' for some t."""
    out = []
    for row in r:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc |= q[j]
            row >>= 1
            j += 1
        out.append(acc)
    return tuple(out)


def union_rows(n: int, relations: Iterable[tuple]) -> tuple:
    acc = [0] * n
    for rel in relations:
        for i, row in enumerate(rel):
            acc[i] |= row
    return tuple(acc)


def as_pairs(model: Model, rows: tuple) -> set:
    return {(s, t) for i, s in enumerate(model.states)
            for j, t in enumerate(model.states) if rows[i] >> j & 1}


def bits(mask: int):
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


class RelationFamily:
    """Data preorders, indistinguishability and persistent accessibility of one model."""

    def __init__(self, model: Model):
        self.model = model
        n = model.size
        self.n = n
        self.pre: dict = {}
        self.eq: dict = {}
        for a in model.agents:
            ks = [model.knowledge(a, s) for s in model.states]
            rows = []
            for i, s in enumerate(model.states):
                base = model.data(a, s)
                row = 0
                for j in range(n):
                    if ks[j].derives_all(base):
                        row |= 1 << j
                rows.append(row)
            self.pre[a] = tuple(rows)
            self.eq[a] = tuple(rows[i] & self._column(rows, i) for i in range(n))
        self._pre_c: dict = {}
        self._eq_c: dict = {}
        self._succ: dict = {}

    @staticmethod
    def _column(rows, i) -> int:
        out = 0
        for j, r in enumerate(rows):
            if r >> i & 1:
                out |= 1 << j
        return out

    def _members(self, community) -> frozenset:
        community = frozenset(community)
        bad = community - set(self.model.agents)
        if bad:
            raise KeyError(f"unknown agent(s) {sorted(bad)}")
        return community

    def pre_c(self, community) -> tuple:
        """≼_C: closure of the union of the members' data preorders."""
        c = self._members(community)
        hit = self._pre_c.get(c)
        if hit is None:
            hit = self._pre_c[c] = star(union_rows(self.n, (self.pre[a] for a in sorted(c))))
        return hit

    def eq_c(self, community) -> tuple:
        """≡_C: closure of the union of the members' indistinguishability relations."""
        c = self._members(community)
        hit = self._eq_c.get(c)
        if hit is None:
            hit = self._eq_c[c] = star(union_rows(self.n, (self.eq[a] for a in sorted(c))))
        return hit

    def successors(self, msg, agent: str, community) -> tuple:
        """Rows of R^M_{a,C}: reach š by ≼_{C∪a}, require a derives M there, then ≡_a."""
        c = self._members(community)
        key = (msg, agent, c)
        hit = self._succ.get(key)
        if hit is None:
            reach = self.pre_c(c | {agent})
            known = self.model.knows_mask(agent, msg)
            eq = self.eq[agent]
            hit = tuple(_spread(row & known, eq) for row in reach)
            self._succ[key] = hit
        return hit

    def accessibility(self, msg, agent: str, community) -> set:
        return as_pairs(self.model, self.successors(msg, agent, community))


def _spread(mask: int, rel: tuple) -> int:
    out = 0
    for j in bits(mask):
        out |= rel[j]
    return out


def build_relations(model: Model) -> RelationFamily:
    return RelationFamily(model)


# -- instant relations ------------------------------------------------------------

class InstantFamily:
    """The information-token relations <_a^M and <_C^M.

    <_C^M is the least family containing each member's <_a^M and with
    <_C^M ; <_C^M' inside <_C^<M,M'>.  Since the only closure condition
    feeds a pair from its two components, the least family is computed
    exactly by recursion on the message.
    """

    def __init__(self, rels: RelationFamily):
        self.rels = rels
        self.model = rels.model
        self._step: dict = {}
        self._rel: dict = {}
        self._succ: dict = {}

    def step(self, agent: str, msg) -> tuple:
        """s <_a^M s'  iff  clo_a^s({M}) = clo_a^s'(∅)."""
        key = (agent, msg)
        hit = self._step.get(key)
        if hit is None:
            m = self.model
            rows = []
            ks = [m.knowledge(agent, t) for t in m.states]
            for s in m.states:
                enriched = m.data(agent, s) | {msg}
                k_s = knowledge(agent, enriched, m.theory)
                row = 0
                for j, t in enumerate(m.states):
                    if ks[j].derives_all(enriched) and k_s.derives_all(m.data(agent, t)):
                        row |= 1 << j
                rows.append(row)
            hit = self._step[key] = tuple(rows)
        return hit

    def relation(self, community, msg) -> tuple:
        c = self.rels._members(community)
        key = (c, msg)
        hit = self._rel.get(key)
        if hit is None:
            parts = [self.step(a, msg) for a in sorted(c)]
            if isinstance(msg, Pair):
                parts.append(compose(self.relation(c, msg.left), self.relation(c, msg.right)))
            hit = self._rel[key] = union_rows(self.model.size, parts)
        return hit

    def successors(self, msg, agent: str, community) -> tuple:
        """Instant accessibility: reach t by <^M_{C∪a}, require a derives M there, then ≡_a."""
        c = self.rels._members(community)
        key = (msg, agent, c)
        hit = self._succ.get(key)
        if hit is None:
            reach = self.relation(c | {agent}, msg)
            known = self.model.knows_mask(agent, msg)
            eq = self.rels.eq[agent]
            hit = self._succ[key] = tuple(_spread(row & known, eq) for row in reach)
        return hit

    def union_relation(self, community, universe: Iterable) -> tuple:
        """The union of <_C^M' over M' in `universe`; the stand-in for ≼_C."""
        return union_rows(self.model.size, (self.relation(community, m) for m in universe))

    def token_successors(self, msg, agent: str, community, universe: Iterable) -> tuple:
        """Accessibility with ≼_{C∪a} replaced by the union over `universe`."""
        c = self.rels._members(community)
        reach = self.union_relation(c | {agent}, universe)
        known = self.model.knows_mask(agent, msg)
        eq = self.rels.eq[agent]
        return tuple(_spread(row & known, eq) for row in reach)

    def witness(self, agent: str, state) -> object:
        """The pair of everything `agent` holds at `state`, its own name included."""
        items = set(self.model.data(agent, state)) | {Agent(agent)}
        return pair_all(sorted(items, key=format_message))

    def witness_universe(self, community, extra: Iterable = (), budget: int = 4096) -> list:
        """Tokens that realise every ≼_C step: agent names and path witnesses.

        For each s ≼_C t a shortest path through the members' preorders is
        turned into the right-nested pair of the per-step witnesses.
        """
        c = sorted(self.rels._members(community))
        m = self.model
        out = dict.fromkeys(Agent(a) for a in c)
        for i in range(m.size):
            # breadth-first search over single preorder steps
            paths = {i: []}
            frontier = [i]
            while frontier:
                nxt = []
                for u in frontier:
                    for a in c:
                        for v in bits(self.rels.pre[a][u]):
                            if v not in paths:
                                paths[v] = paths[u] + [self.witness(a, m.states[v])]
                                nxt.append(v)
                frontier = nxt
            for v, path in paths.items():
                if path:
                    out.setdefault(pair_all(path), None)
            if len(out) > budget:
                raise UniverseBudgetError(
                    f"message universe exceeds {budget} tokens for community {c}")
        for x in extra:
            out.setdefault(x, None)
        if len(out) > budget:
            raise UniverseBudgetError(f"message universe exceeds {budget} tokens")
        return list(out)


def build_instant(model: Model, rels: RelationFamily | None = None) -> InstantFamily:
    return InstantFamily(rels or build_relations(model))


"""First-order matching of schematic formulas against concrete ones.

Schematic formulas come from parsing schema or theorem text with every
parameter replaced by a marker: ``MetaVar`` for messages and formulas,
``"?A"`` strings for agents and ``"*C"`` strings inside communities.
Community constraints and ``BigAnd`` nodes may need bindings found
elsewhere in the formula, so they are deferred and retried until no more
progress is made.
"""

from __future__ import annotations

from .formulas import (And, BigAnd, CommonKnows, Knows, KnowsThat, MetaVar, Not,
                       PropAtom, Proves, conjoin)
from .terms import Agent, Atom, Enc, Hash, Pair, Sig


def is_agent_var(x) -> bool:
    return isinstance(x, str) and x.startswith("?")


def is_community_var(x) -> bool:
    return isinstance(x, str) and x.startswith("*")


def marker_for(name: str, kind: str):
    if kind == "agent":
        return "?" + name
    if kind == "community":
        return frozenset({"*" + name})
    return MetaVar(name, kind)


def marker_key(name: str, kind: str) -> str:
    return {"agent": "?", "community": "*"}.get(kind, "") + name


def _agent(x, b: dict):
    return b.get(x, x) if is_agent_var(x) else x


def _community(c: frozenset, b: dict) -> frozenset:
    out = set()
    for x in c:
        if is_community_var(x):
            out |= b.get(x, {x})
        elif is_agent_var(x):
            out.add(b.get(x, x))
        else:
            out.add(x)
    return frozenset(out)


def subst(p, b: dict):
    """Replace bound markers in `p`; BigAnd unfolds once its community is concrete."""
    t = type(p)
    if t is MetaVar:
        return b.get(p.name, p)
    if t is Agent:
        return Agent(_agent(p.name, b))
    if t is Atom:
        return p
    if t is Sig:
        return Sig(_agent(p.signer, b), subst(p.body, b))
    if t is Pair:
        return Pair(subst(p.left, b), subst(p.right, b))
    if t is Hash:
        return Hash(subst(p.body, b))
    if t is Enc:
        return Enc(subst(p.body, b), subst(p.key, b))
    if t is PropAtom:
        return PropAtom(p.name, tuple(_agent(x, b) for x in p.args))
    if t is Knows:
        return Knows(_agent(p.agent, b), subst(p.msg, b))
    if t is Not:
        return Not(subst(p.body, b))
    if t is And:
        return And(subst(p.left, b), subst(p.right, b))
    if t is Proves:
        return Proves(subst(p.proof, b), subst(p.goal, b), _agent(p.verifier, b),
                      _community(p.community, b))
    if t is KnowsThat:
        return KnowsThat(_agent(p.agent, b), subst(p.body, b))
    if t is CommonKnows:
        return CommonKnows(_community(p.community, b), subst(p.body, b))
    if t is BigAnd:
        community = _community(p.community, b)
        inner = {k: v for k, v in b.items() if k != p.var}
        if any(is_agent_var(x) or is_community_var(x) for x in community):
            return BigAnd(p.var, community, subst(p.body, inner))
        if not community:
            raise ValueError("conjunction over an empty community")
        return conjoin(subst(p.body, dict(inner, **{p.var: x})) for x in sorted(community))
    raise TypeError(f"cannot substitute into {p!r}")


def has_markers(p) -> bool:
    t = type(p)
    if t is MetaVar or t is BigAnd:
        return True
    if t is Agent:
        return is_agent_var(p.name)
    if t is Atom:
        return False
    if t is Sig:
        return is_agent_var(p.signer) or has_markers(p.body)
    if t is Pair:
        return has_markers(p.left) or has_markers(p.right)
    if t is Hash:
        return has_markers(p.body)
    if t is Enc:
        return has_markers(p.body) or has_markers(p.key)
    if t is PropAtom:
        return any(is_agent_var(x) for x in p.args)
    if t is Knows:
        return is_agent_var(p.agent) or has_markers(p.msg)
    if t is Not:
        return has_markers(p.body)
    if t is And:
        return has_markers(p.left) or has_markers(p.right)
    if t is Proves:
        return (is_agent_var(p.verifier) or has_markers(p.proof) or has_markers(p.goal)
                or any(is_agent_var(x) or is_community_var(x) for x in p.community))
    return False


class Matcher:
    """Accumulates a binding from marker keys to concrete values."""

    def __init__(self, binding: dict | None = None):
        self.b: dict = dict(binding or {})
        self.deferred: list = []

    def _bind(self, key, value) -> bool:
        old = self.b.get(key)
        if old is None:
            self.b[key] = value
            return True
        return old == value

    def _agent(self, p: str, t: str) -> bool:
        if is_agent_var(p):
            return self._bind(p, t)
        return p == t

    def _try_community(self, p: frozenset, t: frozenset, final: bool):
        """True/False when decided, None when more bindings are needed."""
        known = set()
        agents_open = []
        groups_open = []
        for x in p:
            if is_community_var(x):
                if x in self.b:
                    known |= self.b[x]
                else:
                    groups_open.append(x)
            elif is_agent_var(x):
                if x in self.b:
                    known.add(self.b[x])
                else:
                    agents_open.append(x)
            else:
                known.add(x)
        if not known <= t:
            return False
        rest = t - known
        if not agents_open and not groups_open:
            return not rest
        if not groups_open:
            if len(agents_open) == 1 and len(rest) == 1:
                return self._bind(agents_open[0], next(iter(rest)))
            if not rest and not final:
                return None
            if len(agents_open) == len(rest) == 0:
                return True
            if not final:
                return None
            return False
        if len(groups_open) == 1 and not agents_open:
            # minimal choice: the community contributes only what is missing
            return self._bind(groups_open[0], frozenset(rest))
        if not final:
            return None
        for g in groups_open[1:]:
            self._bind(g, frozenset())
        if agents_open:
            return None
        return self._bind(groups_open[0], frozenset(rest))

    def match(self, p, t) -> bool:
        tp = type(p)
        if tp is MetaVar:
            return self._bind(p.name, t)
        if tp is BigAnd:
            self.deferred.append((p, t))
            return True
        if tp is not type(t):
            return False
        if tp is Agent:
            return self._agent(p.name, t.name)
        if tp is Atom:
            return p == t
        if tp is Sig:
            return self._agent(p.signer, t.signer) and self.match(p.body, t.body)
        if tp is Pair:
            return self.match(p.left, t.left) and self.match(p.right, t.right)
        if tp is Hash:
            return self.match(p.body, t.body)
        if tp is Enc:
            return self.match(p.body, t.body) and self.match(p.key, t.key)
        if tp is PropAtom:
            return (p.name == t.name and len(p.args) == len(t.args)
                    and all(self._agent(x, y) for x, y in zip(p.args, t.args)))
        if tp is Knows:
            return self._agent(p.agent, t.agent) and self.match(p.msg, t.msg)
        if tp is Not:
            return self.match(p.body, t.body)
        if tp is And:
            return self.match(p.left, t.left) and self.match(p.right, t.right)
        if tp is Proves:
            if not self._agent(p.verifier, t.verifier):
                return False
            self.deferred.append((p.community, t.community))
            return self.match(p.proof, t.proof) and self.match(p.goal, t.goal)
        if tp is KnowsThat:
            return self._agent(p.agent, t.agent) and self.match(p.body, t.body)
        if tp is CommonKnows:
            self.deferred.append((p.community, t.community))
            return self.match(p.body, t.body)
        return p == t

    def finish(self) -> bool:
        """Resolve deferred constraints; False on a definite mismatch."""
        final = False
        while self.deferred:
            pending, self.deferred = self.deferred, []
            progress = False
            for p, t in pending:
                if isinstance(p, frozenset):
                    res = self._try_community(p, t, final)
                    if res is None:
                        self.deferred.append((p, t))
                    elif not res:
                        return False
                    else:
                        progress = True
                else:
                    q = subst(p, self.b)
                    if isinstance(q, BigAnd):
                        self.deferred.append((p, t))
                    else:
                        progress = True
                        if not self.match(q, t):
                            return False
            if not progress:
                if final:
                    return True
                final = True
            else:
                final = False
        return True


def match(pattern, target, binding: dict | None = None) -> dict | None:
    m = Matcher(binding)
    if m.match(pattern, target) and m.finish():
        return m.b
    return None

"""Independent reference implementations used by the tests."""

from __future__ import annotations

from itertools import combinations, product

from lip.terms import Agent, Atom, Enc, Hash, Pair, Sig, depth


def messages_up_to(depth_cap: int, agents, atoms, dolev_yao: bool = False) -> list:
    """Every message over the given names with constructor depth at most `depth_cap`."""
    layers = [[Agent(a) for a in agents] + [Atom(x) for x in atoms]]
    for _ in range(depth_cap):
        below = [m for layer in layers for m in layer]
        new = set()
        for x, y in product(below, repeat=2):
            new.add(Pair(x, y))
            if dolev_yao:
                new.add(Enc(x, y))
        for x in below:
            new.update(Sig(a, x) for a in agents)
            if dolev_yao:
                new.add(Hash(x))
        seen = set(below)
        layers.append(sorted((m for m in new if m not in seen), key=repr))
    return [m for layer in layers for m in layer]


def saturate(agent: str, base, depth_cap: int, dolev_yao: bool = False) -> set:
    """Breadth-first closure of base ∪ {agent} under all rules, keeping depth ≤ cap.

    Derivations of a goal can be normalised so that analysis never acts on
    a synthesised term; every intermediate term is then a subterm of the
    base or of the goal, so the cap need only cover both.
    """
    known = set(base) | {Agent(agent)}
    while True:
        new = set()
        for t in known:
            if isinstance(t, Pair):
                new |= {t.left, t.right}
            elif isinstance(t, Sig):
                new |= {t.body, Agent(t.signer), Pair(t.body, Agent(t.signer))}
            elif isinstance(t, Enc) and dolev_yao and t.key in known:
                new.add(t.body)
            if depth(t) < depth_cap:
                new.add(Sig(agent, t))
                if dolev_yao:
                    new.add(Hash(t))
        small = [t for t in known if depth(t) < depth_cap]
        for x, y in product(small, repeat=2):
            new.add(Pair(x, y))
            if dolev_yao:
                new.add(Enc(x, y))
        new = {t for t in new if depth(t) <= depth_cap} - known
        if not new:
            return known
        known |= new


def bases(universe, max_size: int) -> list:
    return [frozenset(c) for k in range(max_size + 1) for c in combinations(universe, k)]


def derivation_mismatches(derives, theory=None, dolev_yao: bool = False) -> tuple[int, list]:
    """Compare `derives` with the saturation oracle on the exhaustive small universe.

    Bases are all sets of at most two messages of depth ≤ 1 over agents
    a, b and atoms m, n; goals are all messages of depth ≤ 2 (depth ≤ 1
    under Dolev-Yao, whose depth-2 layer is too large to enumerate).
    """
    small = messages_up_to(1, "ab", "mn", dolev_yao)
    goals = messages_up_to(1 if dolev_yao else 2, "ab", "mn", dolev_yao)
    cap = 1 if dolev_yao else 2
    checked, bad = 0, []
    for agent in "ab":
        for base in bases(small, 2):
            known = saturate(agent, base, cap, dolev_yao)
            for g in goals:
                checked += 1
                got = derives(agent, base, g) if theory is None else derives(agent, base, g, theory)
                if (g in known) != got:
                    bad.append((agent, base, g))
    return checked, bad

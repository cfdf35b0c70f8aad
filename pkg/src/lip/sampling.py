"""Seeded random models, messages, communities and formulas."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from .formulas import And, CommonKnows, Knows, KnowsThat, Not, PropAtom, Proves
from .model import Model, repair_forgeries, validate
from .terms import BASE, Agent, Atom, Enc, Hash, Pair, Sig, TermTheory, depth, term_theory

AGENT_NAMES = ("a", "b", "c", "d", "e")
ATOM_NAMES = ("m", "n", "o", "r", "t")
PROP_NAMES = ("P", "Q", "R", "S", "T")


@dataclass(frozen=True)
class SweepConfig:
    seed: int = 0
    models: int = 200
    max_states: int = 5
    max_agents: int = 3
    max_atoms: int = 3
    max_depth: int = 3
    formula_depth: int = 2
    theory: str = "base"
    instances: int = 60  # axiom instances per model
    rule_samples: int = 10  # per rule contract and model
    tuples: int = 25  # theorem tuples per model

    def __post_init__(self):
        for name in ("max_states", "max_agents", "max_atoms", "max_depth", "formula_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.models < 0:
            raise ValueError("models must be nonnegative")
        if self.max_agents > len(AGENT_NAMES) or self.max_atoms > len(ATOM_NAMES):
            raise ValueError("too many agents or atoms requested")
        term_theory(self.theory)

    @property
    def term_theory(self) -> TermTheory:
        return term_theory(self.theory)

    def to_json(self) -> dict:
        return asdict(self)


def model_rng(seed: int, index: int, purpose: str = "model") -> random.Random:
    """Independent stream per (seed, model index, purpose)."""
    return random.Random(f"{seed}:{index}:{purpose}")


class Sampler:
    def __init__(self, rng: random.Random, agents, atoms, theory: TermTheory = BASE,
                 max_depth: int = 3, props=()):
        self.rng = rng
        self.agents = tuple(agents)
        self.atoms = tuple(atoms)
        self.theory = theory
        self.max_depth = max_depth
        self.props = tuple(props)
        self.known: list = []  # messages biased towards by `message`

    def leaf(self):
        if self.rng.random() < 0.3:
            return Agent(self.rng.choice(self.agents))
        return Atom(self.rng.choice(self.atoms))

    def fresh(self, d: int | None = None):
        d = self.max_depth if d is None else d
        r = self.rng
        if d <= 0 or r.random() < 0.35:
            return self.leaf()
        kinds = ["pair", "pair", "sig"]
        if self.theory.dolev_yao:
            kinds += ["hash", "enc"]
        k = r.choice(kinds)
        if k == "pair":
            return Pair(self.fresh(d - 1), self.fresh(d - 1))
        if k == "sig":
            return Sig(r.choice(self.agents), self.fresh(d - 1))
        if k == "hash":
            return Hash(self.fresh(d - 1))
        return Enc(self.fresh(d - 1), self.fresh(d - 1))

    def message(self):
        r = self.rng
        x = r.random()
        if self.known and x < 0.45:
            return r.choice(self.known)
        if self.known and x < 0.6:
            m = Pair(r.choice(self.known), r.choice(self.known))
            return m if depth(m) <= self.max_depth else r.choice(self.known)
        return self.fresh(min(2, self.max_depth))

    def community(self) -> frozenset:
        return frozenset(a for a in self.agents if self.rng.random() < 0.4)

    def agent(self) -> str:
        return self.rng.choice(self.agents)

    def atom_formula(self):
        if self.props and self.rng.random() < 0.4:
            return PropAtom(self.rng.choice(self.props))
        return Knows(self.agent(), self.message())

    def formula(self, d: int, epistemic: bool = False):
        r = self.rng
        if d <= 0 or r.random() < 0.25:
            return self.atom_formula()
        kinds = ["not", "and", "proves", "proves"]
        if epistemic:
            kinds += ["K", "CK"]
        k = r.choice(kinds)
        if k == "not":
            return Not(self.formula(d - 1, epistemic))
        if k == "and":
            return And(self.formula(d - 1, epistemic), self.formula(d - 1, epistemic))
        if k == "proves":
            return Proves(self.message(), self.formula(d - 1, epistemic), self.agent(),
                          self.community())
        if k == "K":
            return KnowsThat(self.agent(), self.formula(d - 1, epistemic))
        return CommonKnows(self.community(), self.formula(d - 1, epistemic))


def random_model(cfg: SweepConfig, index: int) -> Model:
    """The `index`-th model of a sweep; raw data nests often so preorders are rich."""
    rng = model_rng(cfg.seed, index)
    theory = cfg.term_theory
    agents = AGENT_NAMES[:rng.randint(1, cfg.max_agents)]
    states = tuple(f"s{i + 1}" for i in range(rng.randint(1, cfg.max_states)))
    atoms = ATOM_NAMES[:rng.randint(1, cfg.max_atoms)]
    sampler = Sampler(rng, agents, atoms, theory, cfg.max_depth)
    msgs = {}
    for i, s in enumerate(states):
        for a in agents:
            if i and rng.random() < 0.45:
                data = set(msgs.get((a, rng.choice(states[:i])), ()))
                if rng.random() < 0.6:
                    data.add(sampler.fresh())
            else:
                data = {sampler.fresh() for _ in range(rng.randint(0, 3))}
            if data:
                msgs[(a, s)] = frozenset(data)
    msgs = repair_forgeries(agents, states, msgs, theory)
    props = PROP_NAMES[:rng.randint(1, min(2, cfg.max_atoms))]
    valuation = {PropAtom(p): frozenset(s for s in states if rng.random() < 0.5)
                 for p in props}
    return validate(Model(agents, states, msgs, valuation, theory))


def sampler_for(model: Model, cfg: SweepConfig, index: int, purpose: str) -> Sampler:
    atoms = sorted({t.name for t in model.messages() if isinstance(t, Atom)}) or ["m"]
    s = Sampler(model_rng(cfg.seed, index, purpose), model.agents, atoms, model.theory,
                cfg.max_depth, sorted(p.name for p in model.valuation if not p.args))
    known = sorted(model.messages(), key=repr)
    # signature bodies make the signing laws bite
    known += [t.body for t in known if isinstance(t, Sig)]
    s.known = known
    return s

"""Randomised property sweeps over generated models.

Every sweep walks the same model sequence for a given seed; sampling for
each suite draws from its own stream so suites do not perturb each other.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .axioms import BASE_SCHEMAS, DY_SCHEMAS, SCHEMAS, match_axiom
from .checker import Evaluator, box
from .formulas import (And, CommonKnows, Knows, KnowsThat, Not, Proves, conjoin,
                       format_formula, iff, implies)
from .model import InstantFamily, Model, bits, dump_model
from .sampling import Sampler, SweepConfig, random_model, sampler_for
from .terms import Agent, Pair, Sig, format_message


@dataclass
class Violation:
    check: str
    model_dump: str
    state: object
    formula: str
    expected: object = True
    got: object = False

    def to_json(self) -> dict:
        return {"check": self.check, "model_dump": self.model_dump, "state": self.state,
                "formula": self.formula, "expected": self.expected, "got": self.got}


@dataclass
class SweepReport:
    suite: str
    config: SweepConfig
    models: int = 0
    checks: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "SweepReport") -> "SweepReport":
        self.models += other.models
        self.checks.update(other.checks)
        self.violations.extend(other.violations)
        return self

    def failed(self, check: str) -> list:
        return [v for v in self.violations if v.check == check]

    def to_json(self) -> dict:
        return {"suite": self.suite, "config": self.config.to_json(), "models": self.models,
                "checks": dict(sorted(self.checks.items())),
                "violations": [v.to_json() for v in self.violations]}


class _Recorder:
    def __init__(self, report: SweepReport, model: Model):
        self.report = report
        self.model = model
        self._dump = None

    def dump(self) -> str:
        if self._dump is None:
            self._dump = dump_model(self.model)
        return self._dump

    def count(self, check: str, n: int = 1):
        self.report.checks[check] += n

    def expect_global(self, check: str, ev: Evaluator, f) -> bool:
        """Count one check per state; report the first state where `f` fails."""
        m = self.model
        self.count(check, m.size)
        got = ev.mask(f)
        if got == m.full:
            return True
        i = next(bits(m.full & ~got))
        self.violate(check, m.states[i], format_formula(f), True, False)
        return False

    def violate(self, check, state, formula, expected, got):
        self.report.violations.append(
            Violation(check, self.dump(), state, formula, expected, got))


def _subsets(agents) -> list:
    return [frozenset(c) for k in range(len(agents) + 1) for c in combinations(agents, k)]


def _schemas(model: Model) -> tuple:
    return BASE_SCHEMAS + (DY_SCHEMAS if model.theory.dolev_yao else ())


def axiom_instance(sampler: Sampler, name: str, formula_depth: int):
    """A random instance of schema `name` over the sampler's agents."""
    draw = {"agent": sampler.agent, "community": sampler.community,
            "msg": sampler.message,
            "formula": lambda: sampler.formula(formula_depth)}
    bindings = {p: draw[k]() for p, k in SCHEMAS[name].params}
    return match_axiom(name, bindings, sampler.theory, sampler.agents)


# -- soundness ---------------------------------------------------------------------

def soundness_sweep(cfg: SweepConfig, evaluator=Evaluator) -> SweepReport:
    """Axiom instances and the two rules' contracts on random models.

    `evaluator` is a factory ``(model) -> Evaluator``; tests pass a
    deliberately broken one to see that the sweep notices.
    """
    report = SweepReport("soundness", cfg)
    for idx in range(cfg.models):
        model = random_model(cfg, idx)
        report.models += 1
        rec = _Recorder(report, model)
        ev = evaluator(model)
        smp = sampler_for(model, cfg, idx, "soundness")
        schemas = _schemas(model)
        axioms = []
        for j in range(cfg.instances):
            name = schemas[j % len(schemas)]
            f = axiom_instance(smp, name, cfg.formula_depth)
            axioms.append(f)
            rec.expect_global(f"axiom:{name}", ev, f)
        for _ in range(cfg.rule_samples):
            _necessitation(rec, ev, smp, axioms, cfg)
            _antitonicity(rec, ev, smp, cfg)
    return report


def _necessitation(rec: _Recorder, ev, smp: Sampler, axioms, cfg):
    # random formulas are rarely valid, so axiom instances and tautologies are mixed in
    r = smp.rng.random()
    if r < 0.4 and axioms:
        phi = smp.rng.choice(axioms)
    elif r < 0.7:
        psi = smp.formula(cfg.formula_depth)
        phi = implies(psi, psi)
    else:
        phi = smp.formula(cfg.formula_depth)
    rec.count("rule:necessitation-premise")
    if ev.globally(phi):
        rec.expect_global("rule:necessitation", ev,
                          Proves(smp.message(), phi, smp.agent(), smp.community()))


def _antitonicity(rec: _Recorder, ev, smp: Sampler, cfg):
    a = smp.agent()
    m = smp.message()
    r = smp.rng.random()
    if r < 0.3:
        m2 = Pair(m, smp.message())
    elif r < 0.5 and isinstance(m, Pair):
        m, m2 = m.left, m
    elif r < 0.6:
        m2 = Sig(a, m)
    else:
        m2 = smp.message()
    # premise k_a M -> k_a M'; conclusion M' proves φ -> M proves φ
    premise = implies(Knows(a, m), Knows(a, m2))
    rec.count("rule:antitonicity-premise")
    if ev.globally(premise):
        phi = smp.formula(cfg.formula_depth)
        c = smp.community()
        rec.expect_global("rule:antitonicity", ev,
                          implies(Proves(m2, phi, a, c), Proves(m, phi, a, c)))


# -- epistemic theorems ---------------------------------------------------------------

def theorem_formulas(m, phi, a: str, b: str, c: frozenset) -> dict:
    """The five epistemic laws instantiated at (M, φ, a, b, C)."""
    ca = c | {a}
    proof = Proves(m, phi, a, c)
    return {
        "self-knowledge": iff(KnowsThat(a, Knows(a, m)), Knows(a, m)),
        "purpose-of-signing": implies(Knows(a, Sig(b, m)), KnowsThat(a, Knows(b, Sig(b, m)))),
        "proofs-of-knowledge": implies(proof, conjoin(
            Proves(Sig(a, m), And(Knows(a, m), KnowsThat(a, phi)), v, ca)
            for v in sorted(ca))),
        "falsifiability": implies(Not(proof), CommonKnows(ca, Not(proof))),
        "common-proof-knowledge": implies(proof, CommonKnows(ca, proof)),
    }


def boxed_mask(ev: Evaluator, m, phi, a: str, c: frozenset) -> int:
    """States s such that every š with s ≼_{C∪a} š satisfies k_a M -> K_a φ."""
    model = ev.model
    good = (model.full & ~model.knows_mask(a, m)) | ev.mask(KnowsThat(a, phi))
    return box(ev.rels.pre_c(c | {a}), good)


def theorem_sweep(cfg: SweepConfig) -> SweepReport:
    report = SweepReport("theorems", cfg)
    for idx in range(cfg.models):
        model = random_model(cfg, idx)
        report.models += 1
        rec = _Recorder(report, model)
        ev = Evaluator(model)
        smp = sampler_for(model, cfg, idx, "theorems")
        for _ in range(cfg.tuples):
            m = smp.message()
            a, b = smp.agent(), smp.agent()
            c = smp.community()
            phi = smp.formula(cfg.formula_depth, epistemic=True)
            proof = Proves(m, phi, a, c)
            direct = ev.mask(proof)
            boxed = boxed_mask(ev, m, phi, a, c)
            rec.count("boxed-equivalence", model.size)
            for i in bits(direct ^ boxed):
                rec.violate("boxed-equivalence", model.states[i], format_formula(proof),
                            bool(boxed >> i & 1), bool(direct >> i & 1))
            for name, f in theorem_formulas(m, phi, a, b, c).items():
                rec.expect_global(name, ev, f)
            _denotation_monotone(rec, ev, m, a, c)
    return report


def _denotation_monotone(rec: _Recorder, ev: Evaluator, m, a, c):
    """s R s' implies succ(s') ⊆ succ(s), so whatever M proves at s it proves at s'."""
    rows = ev.rels.successors(m, a, c)
    for i, row in enumerate(rows):
        for j in bits(row):
            rec.count("denotation-monotone")
            if rows[j] & ~row:
                rec.violate("denotation-monotone", rec.model.states[j],
                            f"successors of {format_message(m)} for {a},{sorted(c)}",
                            "subset of the successors at " + rec.model.states[i], "larger")


# -- structural properties of the relations ----------------------------------------------

def check_accessibility(rec: _Recorder, ev: Evaluator, messages) -> None:
    """Conditional reflexivity, communal monotonicity and transitivity of R^M_{a,C}."""
    model, rels = rec.model, ev.rels
    subsets = _subsets(model.agents)
    for m in messages:
        for a in model.agents:
            known = model.knows_mask(a, m)
            for c in subsets:
                rows = rels.successors(m, a, c)
                for i, row in enumerate(rows):
                    rec.count("conditional-reflexivity")
                    if known >> i & 1 and not row >> i & 1:
                        rec.violate("conditional-reflexivity", model.states[i],
                                    f"{format_message(m)} for {a},{sorted(c)}", True, False)
                    rec.count("transitivity")
                    for j in bits(row):
                        if rows[j] & ~row:
                            rec.violate("transitivity", model.states[i],
                                        f"{format_message(m)} for {a},{sorted(c)}", True, False)
                            break
                for c2 in subsets:
                    if c < c2:
                        wider = rels.successors(m, a, c2)
                        rec.count("communal-monotonicity", model.size)
                        for i in range(model.size):
                            if rows[i] & ~wider[i]:
                                rec.violate("communal-monotonicity", model.states[i],
                                            f"{format_message(m)} for {a},{sorted(c)}"
                                            f" inside {sorted(c2)}", True, False)


def check_monoid(rec: _Recorder, ev: Evaluator, triples) -> None:
    """Pairing is an idempotent commutative monoid on successor sets, unit the verifier."""
    model, rels = rec.model, ev.rels
    for a in model.agents:
        for c in _subsets(model.agents):
            for x, y, z in triples:
                laws = {
                    "monoid-idempotency": (Pair(x, x), x),
                    "monoid-commutativity": (Pair(x, y), Pair(y, x)),
                    "monoid-associativity": (Pair(x, Pair(y, z)), Pair(Pair(x, y), z)),
                    "monoid-neutral": (Pair(x, Agent(a)), x),
                }
                for law, (lhs, rhs) in laws.items():
                    left = rels.successors(lhs, a, c)
                    right = rels.successors(rhs, a, c)
                    rec.count(law, model.size)
                    for i in range(model.size):
                        if left[i] != right[i]:
                            rec.violate(law, model.states[i],
                                        f"{format_message(lhs)} = {format_message(rhs)}"
                                        f" for {a},{sorted(c)}", True, False)


def check_epistemic_relations(rec: _Recorder, ev: Evaluator, messages) -> None:
    """≡_a is an equivalence and coincides with agreement on individual knowledge."""
    model, rels = rec.model, ev.rels
    universe = sorted(set(messages) | model.messages(), key=repr)
    for a in model.agents:
        eq = rels.eq[a]
        rec.count("s5", model.size)
        for i, row in enumerate(eq):
            sym = all(eq[j] >> i & 1 for j in bits(row))
            trans = all(eq[j] & ~row == 0 for j in bits(row))
            if not (row >> i & 1 and sym and trans):
                rec.violate("s5", model.states[i], f"indistinguishability of {a}", True, False)
        masks = [model.knows_mask(a, m) for m in universe]
        for i in range(model.size):
            for j in range(model.size):
                rec.count("indistinguishability")
                same = all((k >> i & 1) == (k >> j & 1) for k in masks)
                if same != bool(eq[i] >> j & 1):
                    rec.violate("indistinguishability", model.states[i],
                                f"{a} vs {model.states[j]}", same, bool(eq[i] >> j & 1))


def check_instant(rec: _Recorder, ev: Evaluator, smp: Sampler, messages, cfg,
                  budget: int = 4096) -> None:
    """Instancy in instant mode, and the token-union stand-in agreeing with ≼."""
    model, rels = rec.model, ev.rels
    inst = InstantFamily(rels)
    iev = Evaluator(model, rels, "instant")
    iev.instant = inst
    for _ in range(3):
        phi = smp.formula(cfg.formula_depth, epistemic=True)
        for a in model.agents:
            rec.expect_global("instancy", iev,
                              iff(Proves(Agent(a), phi, a, frozenset()), KnowsThat(a, phi)))
    for a in model.agents:
        rec.count("instant-step-is-indistinguishability", model.size)
        if inst.relation({a}, Agent(a)) != rels.eq[a]:
            rec.violate("instant-step-is-indistinguishability", model.states[0],
                        f"<_{a}^{a}", True, False)
    for d in _subsets(model.agents):
        if not d:
            continue
        universe = inst.witness_universe(d, messages, budget)
        union = inst.union_relation(d, universe)
        pre = rels.pre_c(d)
        rec.count("token-union-equals-preorder", model.size)
        for i in range(model.size):
            if union[i] != pre[i]:
                rec.violate("token-union-equals-preorder", model.states[i],
                            f"community {sorted(d)}", bin(pre[i]), bin(union[i]))
        for a in sorted(d):
            for c in (d - {a}, d):
                for m in messages:
                    rec.count("notion3-equals-notion1", model.size)
                    if inst.token_successors(m, a, c, universe) != rels.successors(m, a, c):
                        rec.violate("notion3-equals-notion1", model.states[0],
                                    f"{format_message(m)} for {a},{sorted(c)}", True, False)


def property_sweep(cfg: SweepConfig) -> SweepReport:
    report = SweepReport("properties", cfg)
    for idx in range(cfg.models):
        model = random_model(cfg, idx)
        report.models += 1
        rec = _Recorder(report, model)
        ev = Evaluator(model)
        smp = sampler_for(model, cfg, idx, "properties")
        messages = [smp.message() for _ in range(6)]
        check_accessibility(rec, ev, messages)
        check_monoid(rec, ev, [(smp.message(), smp.message(), smp.message()) for _ in range(2)])
        check_epistemic_relations(rec, ev, messages)
        check_instant(rec, ev, smp, messages[:3], cfg)
    return report


SUITES = {"soundness": soundness_sweep, "theorems": theorem_sweep,
          "properties": property_sweep}


def run_suite(name: str, cfg: SweepConfig) -> SweepReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r} (expected {', '.join(SUITES)})") from None
    return fn(cfg)

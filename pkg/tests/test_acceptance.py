"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
import zlib
from functools import lru_cache
from importlib import resources
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from mutations import mutations  # noqa: E402
from oracles import bases, derivation_mismatches, messages_up_to  # noqa: E402

from lip.checker import Evaluator  # noqa: E402
from lip.corpus import load_corpus, run_corpus  # noqa: E402
from lip.derivation import derives, scott_check  # noqa: E402
from lip.formulas import Knows, Proves, implies  # noqa: E402
from lip.kernel import check_script  # noqa: E402
from lip.model import load_model  # noqa: E402
from lip.sampling import SweepConfig  # noqa: E402
from lip.sweeps import property_sweep, soundness_sweep, theorem_sweep  # noqa: E402
from lip.terms import DY, Agent  # noqa: E402

PRESETS = ("base", "dy")
SWEEP = dict(seed=0, models=200, max_states=5, max_agents=3, max_depth=3)

# the laws every corpus run must cover, grouped as in the criterion
REQUIRED = {
    "structural": [
        "left-projection", "right-projection", "pairing-idempotency", "pairing-commutativity",
        "neutral-pair-elements", "self-neutral-pair-element", "pairing-associativity",
        "epistemic-bitonicity", "proof-extension-left", "proof-extension-right",
        "proof-extension", "proof-idempotency", "proof-commutativity", "neutral-proof-elements",
        "self-neutral-proof-element", "proof-associativity", "self-signing-elimination",
        "signing-introduction", "self-signing-idempotency"],
    "structural-singleton": ["total-knowledge", "epistemic-indifference", "proof-indifference"],
    "logical": [
        "kripke-law", "regularity", "regularity-bis", "epistemic-regularity",
        "epistemic-regularity-bis", "proof-conjunctions", "proof-conjunctions-bis",
        "proof-disjunctions", "proof-disjunctions-bis", "anything-proves-truth",
        "self-truthfulness", "known-proves-no-falsehood", "own-name-proves-no-falsehood",
        "epistemic-proof-consistency", "own-name-consistent-proof", "authentic-knowledge",
        "self-knowledge", "simple-peer-review", "group-decomposition-bis",
        "self-neutral-group-element", "self-proof-of-truthfulness",
        "self-proof-of-proof-consistency", "simple-peer-review-bis", "modal-idempotency"],
    "logical-singleton": ["nothing-proves-falsehood", "truthfulness", "proof-consistency"],
    "s-combinator": ["s-combinator-knowledge", "s-combinator-proof"],
    "gettier": ["gettier-lemma", "gettier-proposition", "gettier-signing-lemma",
                "gettier-signing-corollary"],
    "lp": ["lp-propositional-axioms", "lp-sum", "lp-application", "lp-reflection",
           "lp-proof-checker", "lp-modus-ponens", "lp-necessitation"],
    "dy": ["hash-proof", "encryption-proof", "decryption-proof", "own-key-decryption-proof"],
}


def report(capsys, number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _config(theory: str) -> SweepConfig:
    return SweepConfig(theory=theory, **SWEEP)


@lru_cache(maxsize=None)
def soundness(theory: str):
    t0 = time.perf_counter()
    r = soundness_sweep(_config(theory))
    return r, time.perf_counter() - t0


@lru_cache(maxsize=None)
def theorems(theory: str):
    return theorem_sweep(_config(theory))


@lru_cache(maxsize=None)
def properties(theory: str):
    return property_sweep(_config(theory))


def _violations(reports, checks) -> tuple[int, int]:
    n = sum(r.checks[c] for r in reports for c in checks)
    bad = sum(len(r.failed(c)) for r in reports for c in checks)
    return n, bad


# -- criteria --------------------------------------------------------------------

def check_1():
    run = run_corpus()
    names = {r.name for r in run.results}
    missing = [n for group in REQUIRED.values() for n in group if n not in names]
    rejected = [r.name for r in run.failures()]
    ok = not missing and not rejected and run.seconds < 10
    return ok, (f"{len(run.results)} scripts, {len(rejected)} rejected, "
                f"{len(missing)} required laws missing, {run.seconds:.2f}s (< 10s)")


def check_2():
    scripts = load_corpus()
    theory = run_corpus(scripts).theory
    total = rejected = 0
    for name, text in scripts.items():
        for _, mutated in mutations(text, zlib.crc32(name.encode()), scripts):
            total += 1
            rejected += not check_script(theory, mutated).accepted
    return total == 5 * len(scripts) and rejected == total, \
        f"{rejected}/{total} mutations rejected (5 per script)"


def check_3():
    parts, ok = [], True
    seconds = 0.0
    for theory in PRESETS:
        r, dt = soundness(theory)
        seconds += dt
        axioms = sum(v for k, v in r.checks.items() if k.startswith("axiom:"))
        ok &= r.ok and r.models == 200 and r.config.instances >= 50
        parts.append(f"{theory}: {len(r.violations)} violations, {axioms} axiom checks, "
                     f"{r.config.instances} instances/model")
    ok &= seconds < 60
    return ok, "; ".join(parts) + f"; {seconds:.1f}s (< 60s)"


ACCESS = ("conditional-reflexivity", "communal-monotonicity", "transitivity")


def check_4():
    n, bad = _violations([properties(t) for t in PRESETS], ACCESS)
    return bad == 0 and n > 0, f"{n} checks over 400 models, {bad} violations"


def check_5():
    n, bad = _violations([theorems(t) for t in PRESETS], ["boxed-equivalence"])
    return bad == 0 and n >= 10_000, f"{n} tuples (>= 10000), {bad} disagreements"


THEOREMS = ("proofs-of-knowledge", "falsifiability", "common-proof-knowledge",
            "self-knowledge", "purpose-of-signing")


def check_6():
    reports = [theorems(t) for t in PRESETS]
    per = {c: _violations(reports, [c]) for c in THEOREMS}
    ok = all(bad == 0 and n > 0 for n, bad in per.values())
    return ok, ", ".join(f"{c} {n}/{bad}" for c, (n, bad) in per.items()) + " (checks/violations)"


MONOID = ("monoid-idempotency", "monoid-commutativity", "monoid-associativity",
          "monoid-neutral")


def check_7():
    n, bad = _violations([properties(t) for t in PRESETS], MONOID)
    return bad == 0 and n > 0, f"{n} successor-set identities, {bad} violations"


def check_8():
    checked, bad = derivation_mismatches(derives)
    checked_dy, bad_dy = derivation_mismatches(derives, DY, dolev_yao=True)
    small = messages_up_to(1, "ab", "mn")
    samples = [(d, g) for d in bases(small, 2) for g in small]
    scott = [scott_check(a, [], samples) for a in "ab"]
    closure_bad = 0
    for agent in "ab":
        for base in bases(small, 2):
            derived = {g for g in small if derives(agent, base, g)}
            closure_bad += not all(derives(agent, base, x) for x in base)
            for x in small:
                ext = {g for g in small if derives(agent, base | {x}, g)}
                closure_bad += not derived <= ext
                if x in derived:
                    closure_bad += ext != derived
    scott_bad = sum(len(r.violations) for r in scott)
    ok = not bad and not bad_dy and not closure_bad and not scott_bad
    return ok, (f"oracle {checked} base + {checked_dy} DY queries, "
                f"{len(bad) + len(bad_dy)} mismatches; closure laws {closure_bad} and "
                f"Scott properties {scott_bad} violations")


INSTANT = ("instancy", "instant-step-is-indistinguishability", "token-union-equals-preorder",
           "notion3-equals-notion1")


def check_9():
    reports = [properties(t) for t in PRESETS]
    per = {c: _violations(reports, [c]) for c in INSTANT}
    ok = all(bad == 0 and n > 0 for n, bad in per.values())
    return ok, ", ".join(f"{c} {n}/{bad}" for c, (n, bad) in per.items()) + " (checks/violations)"


def check_10():
    model = load_model(resources.files("lip") / "models" / "interactivity.lipm")
    ev = Evaluator(model)
    b = Agent("b")
    reflection = implies(Proves(b, Knows("a", b), "a", frozenset()), Knows("a", b))
    self_knowledge = Proves(b, Knows("a", b), "a", frozenset())
    shape = model.agents == ("a", "b") and model.states == ("s",) and not model.data("a", "s")
    refl = ev.holds("s", reflection)
    selfk = ev.holds("s", self_knowledge)
    return shape and not refl and selfk, f"reflection {refl} (want False), self-knowledge {selfk}"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9,
          check_10]


def _run(capsys, number):
    ok, detail = CHECKS[number - 1]()
    report(capsys, number, ok, detail)
    assert ok, detail


def test_criterion_01_corpus(capsys):
    _run(capsys, 1)


def test_criterion_02_mutations(capsys):
    _run(capsys, 2)


def test_criterion_03_soundness(capsys):
    _run(capsys, 3)


def test_criterion_04_accessibility(capsys):
    _run(capsys, 4)


def test_criterion_05_boxed_equivalence(capsys):
    _run(capsys, 5)


def test_criterion_06_epistemic_theorems(capsys):
    _run(capsys, 6)


def test_criterion_07_monoid_laws(capsys):
    _run(capsys, 7)


def test_criterion_08_derivation_oracle(capsys):
    _run(capsys, 8)


def test_criterion_09_instant_mode(capsys):
    _run(capsys, 9)


def test_criterion_10_interactivity(capsys):
    _run(capsys, 10)


if __name__ == "__main__":
    failed = 0
    for i, check in enumerate(CHECKS, 1):
        ok, detail = check()
        report(None, i, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)

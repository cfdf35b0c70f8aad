import pytest

from lip.checker import Evaluator
from lip.model import dump_model, parse_model
from lip.sampling import SweepConfig, random_model
from lip.sweeps import property_sweep, run_suite, soundness_sweep, theorem_sweep

SMALL = SweepConfig(models=15)


class TruthfulnessBroken(Evaluator):
    """Every proof is accepted everywhere, so proofs of falsehoods slip through."""

    def proves_mask(self, f):
        return self.model.full


def test_zero_models_gives_empty_report():
    report = soundness_sweep(SweepConfig(models=0))
    assert report.ok and report.models == 0 and not report.checks


def test_corrupted_evaluator_is_caught():
    report = soundness_sweep(SMALL, TruthfulnessBroken)
    assert report.failed("axiom:epistemic-truthfulness")
    v = report.violations[0]
    assert v.expected is True and v.got is False
    assert parse_model(v.model_dump)


def test_small_sweeps_clean():
    for suite in ("soundness", "theorems", "properties"):
        for theory in ("base", "dy"):
            report = run_suite(suite, SweepConfig(models=10, theory=theory))
            assert report.ok, report.violations[:1]
            assert sum(report.checks.values()) > 0


def test_same_seed_same_report():
    a = theorem_sweep(SMALL).to_json()
    b = theorem_sweep(SMALL).to_json()
    assert a == b


def test_seed_changes_models():
    dumps = {dump_model(random_model(SweepConfig(seed=s), 0)) for s in range(5)}
    assert len(dumps) > 1


def test_random_models_respect_bounds():
    cfg = SweepConfig(max_states=3, max_agents=2, max_depth=2)
    for i in range(40):
        model = random_model(cfg, i)
        assert 1 <= model.size <= 3 and 1 <= len(model.agents) <= 2


def test_bad_config():
    with pytest.raises(ValueError):
        SweepConfig(max_states=0)
    with pytest.raises(ValueError):
        run_suite("nonsense", SMALL)


def test_property_report_counts():
    report = property_sweep(SweepConfig(models=5))
    for check in ("conditional-reflexivity", "transitivity", "communal-monotonicity",
                  "monoid-neutral", "s5", "instancy", "notion3-equals-notion1"):
        assert report.checks[check] > 0

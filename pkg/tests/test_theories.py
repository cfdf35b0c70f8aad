import pytest

from lip.axioms import BASE_SCHEMAS
from lip.corpus import corpus_names, corpus_text
from lip.model import parse_model
from lip.theories import PRESET_NAMES, PresetError, TheoryPreset, load_preset
from lip.terms import BASE, DY


def test_base_preset():
    p = load_preset("base")
    assert p.term_theory == BASE and p.schemas == BASE_SCHEMAS and p.society == "general"


def test_dy_preset_adds_three_axioms():
    p = load_preset("dy")
    assert p.term_theory == DY and p.extra_schemas == ("hash", "enc", "dec")


def test_singleton_preset():
    p = load_preset("base-singleton")
    assert p.singleton == "a" and p.society == "singleton"
    assert p.admits(corpus_text("total-knowledge"))
    assert not load_preset("base").admits(corpus_text("total-knowledge"))
    assert p.sweep_config().max_agents == 1


def test_dy_scripts_need_dy():
    assert load_preset("dy").admits(corpus_text("hash-proof"))
    assert not load_preset("base").admits(corpus_text("hash-proof"))


def test_every_corpus_script_fits_some_preset():
    presets = [load_preset(n) for n in PRESET_NAMES]
    for name in corpus_names():
        assert any(p.admits(corpus_text(name)) for p in presets), name


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_round_trip(name):
    p = load_preset(name)
    assert TheoryPreset.deserialize(p.serialize()) == p


def test_unknown_preset():
    with pytest.raises(PresetError):
        load_preset("lp")


def test_tampered_preset_rejected():
    text = load_preset("base").serialize().replace('"base"}', '"dy"}').replace(
        '"term_theory": "base"', '"term_theory": "dy"')
    with pytest.raises(PresetError):
        TheoryPreset.deserialize(text)


def test_model_checked_against_preset():
    model = parse_model("agents {a, b}\ntheory base\nstates {s}\n")
    load_preset("base").check_model(model)
    with pytest.raises(PresetError):
        load_preset("dy").check_model(model)
    with pytest.raises(PresetError):
        load_preset("base-singleton").check_model(model)

"""Theory presets: term rules, axiom schemas and society mode in one bundle."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .axioms import BASE_SCHEMAS, DY_SCHEMAS
from .kernel import parse_script
from .model import Model, theory_label
from .sampling import SweepConfig
from .terms import BASE, DY, TermTheory, term_theory

PRESET_NAMES = ("base", "dy", "base-singleton")


class PresetError(ValueError):
    pass


@dataclass(frozen=True)
class TheoryPreset:
    name: str
    term_theory: TermTheory
    extra_schemas: tuple = ()
    singleton: str | None = None  # the only agent, in singleton-society mode

    @property
    def schemas(self) -> tuple:
        return BASE_SCHEMAS + self.extra_schemas

    @property
    def society(self) -> str:
        return "general" if self.singleton is None else "singleton"

    def admits(self, script) -> bool:
        """Whether a proof script's header fits this preset."""
        if isinstance(script, str):
            script = parse_script(script)
        if script.singleton:
            return self.singleton == script.singleton
        if script.theory == "dy":
            return self.term_theory.dolev_yao
        return True

    def check_model(self, model: Model) -> None:
        if model.theory != self.term_theory:
            raise PresetError(f"model uses theory {theory_label(model.theory)}, "
                              f"preset {self.name} needs {theory_label(self.term_theory)}")
        if self.singleton is not None and model.agents != (self.singleton,):
            raise PresetError(f"preset {self.name} allows only agent {self.singleton}")

    def sweep_config(self, **overrides) -> SweepConfig:
        cfg = SweepConfig(theory=theory_label(self.term_theory), **overrides)
        if self.singleton is not None:
            # generated models name their agents a, b, ...; one agent means just a
            if self.singleton != "a":
                raise PresetError("singleton sweeps generate agent a only")
            cfg = replace(cfg, max_agents=1)
        return cfg

    def to_json(self) -> dict:
        return {"name": self.name, "term_theory": theory_label(self.term_theory),
                "extra_schemas": list(self.extra_schemas), "singleton": self.singleton}

    def serialize(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def deserialize(cls, text: str) -> "TheoryPreset":
        try:
            d = json.loads(text)
            preset = cls(d["name"], term_theory(d["term_theory"]),
                         tuple(d["extra_schemas"]), d["singleton"])
        except (KeyError, TypeError, ValueError) as e:
            raise PresetError(f"malformed preset: {e}") from None
        if preset != load_preset(preset.name, preset.singleton or "a"):
            raise PresetError(f"preset {preset.name} does not match its definition")
        return preset


def load_preset(name: str, agent: str = "a") -> TheoryPreset:
    if name == "base":
        return TheoryPreset("base", BASE)
    if name == "dy":
        return TheoryPreset("dy", DY, DY_SCHEMAS)
    if name == "base-singleton":
        return TheoryPreset("base-singleton", BASE, singleton=agent)
    raise PresetError(f"unknown preset {name!r} (expected {', '.join(PRESET_NAMES)})")

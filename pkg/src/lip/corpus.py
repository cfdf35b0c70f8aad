"""The shipped proof-script corpus and a runner for it.

Scripts live in the ``corpus`` package directory; ``MANIFEST`` lists their
names in dependency order.  Each accepted script is registered under its
name so later scripts can cite it with ``by NAME``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources

from .kernel import Theory, Verdict


@dataclass
class CorpusResult:
    name: str
    verdict: Verdict
    seconds: float


@dataclass
class CorpusRun:
    results: list = field(default_factory=list)
    theory: Theory | None = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.verdict.accepted for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.verdict.accepted]


def corpus_dir():
    return resources.files("lip") / "corpus"


def corpus_names() -> list[str]:
    text = (corpus_dir() / "MANIFEST").read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def corpus_text(name: str) -> str:
    return (corpus_dir() / f"{name}.lipp").read_text()


def load_corpus() -> dict:
    """Name -> script text, in manifest order."""
    return {name: corpus_text(name) for name in corpus_names()}


def run_corpus(scripts: dict | None = None, theory: Theory | None = None) -> CorpusRun:
    """Check every script in order; a rejected script is not registered."""
    scripts = load_corpus() if scripts is None else scripts
    theory = Theory("corpus") if theory is None else theory
    run = CorpusRun(theory=theory)
    start = time.perf_counter()
    for name, text in scripts.items():
        t0 = time.perf_counter()
        verdict = theory.admit(name, text)
        run.results.append(CorpusResult(name, verdict, time.perf_counter() - t0))
    run.seconds = time.perf_counter() - start
    return run

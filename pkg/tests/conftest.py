import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lip.corpus import run_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus_run():
    return run_corpus()


@pytest.fixture(scope="session")
def corpus_theory(corpus_run):
    return corpus_run.theory

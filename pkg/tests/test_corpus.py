import zlib

import pytest

from mutations import mutations
from lip.corpus import corpus_names, load_corpus
from lip.kernel import check_script

SCRIPTS = load_corpus()


def test_every_script_accepted(corpus_run):
    assert [r.name for r in corpus_run.failures()] == []
    assert len(corpus_run.results) == len(corpus_names())


def test_expected_laws_present():
    for name in ("pairing-associativity", "proof-extension", "s-combinator-proof",
                 "total-knowledge", "self-knowledge", "simple-peer-review", "truthfulness",
                 "gettier-lemma", "gettier-proposition", "gettier-signing-lemma",
                 "gettier-signing-corollary", "lp-proof-checker", "hash-proof",
                 "encryption-proof", "decryption-proof"):
        assert name in SCRIPTS


@pytest.mark.parametrize("name", list(SCRIPTS))
def test_mutations_rejected(corpus_theory, name):
    for op, text in mutations(SCRIPTS[name], zlib.crc32(name.encode()), SCRIPTS):
        assert text != SCRIPTS[name]
        v = check_script(corpus_theory, text)
        assert not v.accepted, (name, op)

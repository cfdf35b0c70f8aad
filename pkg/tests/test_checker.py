from importlib import resources

import pytest

from lip.checker import (EvalError, Evaluator, Query, denotation_successors, evaluate,
                         parse_query)
from lip.formulas import Knows, KnowsThat, Proves, implies, iff
from lip.model import build_relations, load_model, parse_model
from lip.sweeps import boxed_mask
from lip.terms import Agent, Atom, Pair

m, n = Atom("m"), Atom("n")
EMPTY = frozenset()

CHAIN = """agents {a, b}
states {s1, s2, s3}
msgs a s2 { m }
msgs a s3 { m, n }
msgs b s2 { n }
msgs b s3 { n }
atoms P {s2, s3}
"""


@pytest.fixture
def chain():
    return parse_model(CHAIN)


def golden():
    return load_model(resources.files("lip") / "models" / "interactivity.lipm")


def test_own_name_known_everywhere(chain):
    ev = Evaluator(chain)
    assert ev.globally(Knows("a", Agent("a")))


def test_self_knowledge_law_instance(chain):
    assert Evaluator(chain).globally(Proves(n, Knows("a", n), "a", EMPTY))


def test_interactivity_counter_example():
    model = golden()
    assert model.agents == ("a", "b") and model.states == ("s",)
    assert model.data("a", "s") == frozenset()
    reflection = implies(Proves(Agent("b"), Knows("a", Agent("b")), "a", EMPTY),
                         Knows("a", Agent("b")))
    assert not evaluate(model, None, "s", reflection)
    assert evaluate(model, None, "s", Proves(Agent("b"), Knows("a", Agent("b")), "a", EMPTY))


def test_instancy_in_instant_mode(chain):
    ev = Evaluator(chain, mode="instant")
    for text in ("P", "k[b](n)", "m :[a,{b}] P", "~k[a](m)"):
        phi = parse_query(chain, text)
        for a in chain.agents:
            assert ev.globally(iff(Proves(Agent(a), phi, a, EMPTY), KnowsThat(a, phi)))


def test_successor_monoid_examples(chain):
    rels = build_relations(chain)
    for s in chain.states:
        for c in (EMPTY, frozenset({"b"})):
            succ = lambda x: denotation_successors(chain, rels, s, x, "a", c)  # noqa: E731
            assert succ(Pair(m, m)) == succ(m)
            assert succ(Pair(m, n)) == succ(Pair(n, m))
            assert succ(Pair(m, Agent("a"))) == succ(m)


def test_boxed_equivalence_on_chain(chain):
    ev = Evaluator(chain)
    for text in ("P", "k[b](n)", "~P", "n :[b,{}] P"):
        phi = parse_query(chain, text)
        for msg in (m, n, Agent("a"), Pair(m, n)):
            for c in (EMPTY, frozenset({"b"})):
                assert ev.mask(Proves(msg, phi, "a", c)) == boxed_mask(ev, msg, phi, "a", c)


def test_k_and_ck(chain):
    ev = Evaluator(chain)
    # b holds the same data at s2 and s3
    assert ev.holds("s2", parse_query(chain, "K[b](P)"))
    assert not ev.holds("s2", parse_query(chain, "K[b](k[a](n))"))
    assert ev.holds("s2", parse_query(chain, "CK[{a,b}](P)"))
    assert not ev.holds("s1", parse_query(chain, "CK[{}](P)"))


def test_query_global_truth(chain):
    assert Query(parse_query(chain, "k[a](a)")).answer(chain)
    assert not Query(parse_query(chain, "P")).answer(chain)
    assert Query(parse_query(chain, "P"), "s2").answer(chain)


def test_unknown_state_and_atom(chain):
    with pytest.raises(EvalError):
        evaluate(chain, None, "s9", Knows("a", m))
    with pytest.raises(EvalError):
        Evaluator(chain).mask(parse_query(chain, "Q"))


def test_unknown_mode(chain):
    with pytest.raises(EvalError):
        Evaluator(chain, mode="eventual")


def test_macros_are_expanded(chain):
    ev = Evaluator(chain)
    f = parse_query(chain, "decides[a,{}](m, P)")
    g = parse_query(chain, "m :[a,{}] P \\/ m :[a,{}] ~P")
    assert ev.mask(f) == ev.mask(g)

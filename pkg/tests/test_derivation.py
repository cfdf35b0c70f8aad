from itertools import combinations

import pytest

from oracles import bases, messages_up_to, saturate
from lip.derivation import (DerivationQuery, analysis_set, closure_subset, derives,
                            scott_check)
from lip.terms import BASE, DY, Agent, Atom, Enc, Pair, Sig, depth

m, n, k = Atom("m"), Atom("n"), Atom("k")
a, b = Agent("a"), Agent("b")


def test_own_name_always_derivable():
    assert derives("a", [], a)


def test_signature_analysis_then_unpairing():
    base = [Sig("b", m)]
    assert derives("a", base, Pair(m, b))
    assert derives("a", base, m)


def test_no_foreign_signatures():
    assert not derives("a", [m, b], Sig("b", m))
    assert derives("a", [m], Sig("a", m))


def test_repairing_in_other_order():
    assert derives("a", [Pair(Atom("m1"), Atom("m2"))], Pair(Atom("m2"), Atom("m1")))


def test_decryption_needs_the_key():
    assert not derives("a", [Enc(m, k)], m, DY)
    assert derives("a", [Enc(m, k), k], m, DY)


def test_late_key_unlocks_nested_ciphertext():
    base = [Enc(Enc(m, n), k), Enc(k, Pair(a, n)), n]
    assert derives("a", base, m, DY)


def test_query_object():
    assert DerivationQuery("a", frozenset({m}), Pair(m, a)).decide()


def test_closure_subset_examples():
    assert closure_subset("a", [], [m])
    assert closure_subset("a", [Pair(m, n)], [m, n])
    assert closure_subset("a", [m, n], [Pair(m, n)])
    assert not closure_subset("a", [Sig("b", m)], [m, b])


def test_analysis_set_contents():
    assert analysis_set("a", [Sig("b", Pair(m, n))]) == {
        a, Sig("b", Pair(m, n)), Pair(m, n), m, n, b}


SMALL = messages_up_to(1, "ab", "mn")
GOALS = messages_up_to(2, "ab", "mn")
BASES = bases(SMALL, 2)


def test_oracle_universe_size():
    assert len(SMALL) == 28 and len(GOALS) == 844 and len(BASES) == 407


@pytest.mark.parametrize("agent", ["a", "b"])
def test_exhaustive_oracle_agreement(agent):
    for base in BASES:
        known = saturate(agent, base, 2)
        for g in GOALS:
            assert (g in known) == derives(agent, base, g), (agent, sorted(map(str, base)), g)


@pytest.mark.parametrize("agent", ["a", "b"])
def test_exhaustive_oracle_agreement_dy(agent):
    small = messages_up_to(1, "ab", "mn", True)
    for base in bases(small, 2):
        known = saturate(agent, base, 1, True)
        for g in small:
            assert (g in known) == derives(agent, base, g, DY)


def test_closure_operator_laws():
    for agent in "ab":
        for base in BASES:
            derived = {g for g in SMALL if derives(agent, base, g)}
            # extensive
            assert all(derives(agent, base, x) for x in base)
            # monotone along one-element extensions
            for x in SMALL:
                if x not in base:
                    assert derived <= {g for g in SMALL if derives(agent, base | {x}, g)}
            # idempotent: adding what is derivable changes nothing
            for x in derived:
                assert all(derives(agent, base | {x}, g) == (g in derived) for g in SMALL)
            # compact: a subset of the base of size at most |base| already suffices
            for g in derived:
                assert any(derives(agent, frozenset(c), g)
                           for r in range(len(base) + 1) for c in combinations(base, r))


def test_scott_properties_on_universe():
    samples = [(d, g) for d in BASES for g in SMALL]
    for agent in "ab":
        report = scott_check(agent, [], samples)
        assert report.ok, report.violations[:3]
        assert report.checked == len(samples)


def test_scott_check_relative_to_state():
    report = scott_check("a", [Sig("b", m)], [(set(), Pair(m, b)), ({n}, Pair(n, m))])
    assert report.ok


def test_scott_check_empty():
    assert scott_check("a", [], []).checked == 0


def test_deterministic():
    g = Pair(Sig("a", m), n)
    assert derives("a", [m, n], g) == derives("a", [m, n], g) is True


def test_goal_depth_bounds():
    assert max(depth(g) for g in GOALS) == 2

import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import random_hdg
from hdgames.core import (
    EMPTY,
    Cmp,
    Concept,
    Deviation,
    EmptyCoalitionError,
    Game,
    GameError,
    InvalidBoundsError,
    NotInDomainError,
    Outcome,
    OverlappingCoalitionsError,
    PreferenceOrder,
    UncoveredAgentError,
    UnknownAgentError,
    Variant,
    all_deviations,
    apply_deviation,
    build_theta_set,
    coalition_ratio,
    compare_for_agent,
    find_deviation,
    format_ratio,
    is_valid_deviation,
    parse_ratio,
    pareto_dominates,
    validate_outcome,
)
from hdgames.dynamics import sample_uniform_partition
from hdgames.oracle import enumerate_partitions
from hdgames.reductions import canonical_instance


# theta ---------------------------------------------------------------------


@pytest.mark.parametrize("r, n, expected", [
    (2, 3, [F(0), F(1, 3), F(1, 2), F(2, 3), F(1)]),
    (1, 2, [F(0), F(1, 2), F(1)]),
    (0, 4, [F(0)]),
])
def test_theta_examples(r, n, expected):
    assert list(build_theta_set(r, n)) == expected


@pytest.mark.parametrize("r, n", [(3, 2), (0, 0), (-1, 3)])
def test_theta_invalid_bounds(r, n):
    with pytest.raises(InvalidBoundsError):
        build_theta_set(r, n)


@given(st.integers(1, 25), st.data())
def test_theta_matches_definition(n, data):
    r = data.draw(st.integers(0, n))
    theta = build_theta_set(r, n)
    expected = sorted({F(j, k) for j in range(r + 1) for k in range(max(j, 1), n + 1)})
    assert list(theta) == expected
    assert F(0) in theta
    assert (F(1) in theta) == (r >= 1)
    assert all(a < b for a, b in zip(theta, list(theta)[1:]))


def test_ratio_text_round_trip():
    assert parse_ratio("2/4") == F(1, 2)
    assert format_ratio(F(0)) == "0/1"
    assert format_ratio(F(6, 9)) == "2/3"
    with pytest.raises(ValueError):
        parse_ratio("3/2")


# ratios and comparison -------------------------------------------------------


def test_coalition_ratio_example_1():
    g = canonical_instance("example-1")
    # published agents 1, 4, 5 are ours 0, 3, 4
    assert coalition_ratio({0, 3, 4}, g) == F(2, 3)
    assert coalition_ratio({3}, g) == 1
    assert coalition_ratio({0, 3}, g) == F(1, 2)
    with pytest.raises(EmptyCoalitionError):
        coalition_ratio(set(), g)
    with pytest.raises(UnknownAgentError):
        coalition_ratio({7}, g)


def test_compare_example_1():
    g = canonical_instance("example-1")
    assert compare_for_agent(g.preferences[1], F(2, 3), F(1, 2)) is Cmp.BETTER
    assert compare_for_agent(g.preferences[0], F(2, 3), F(1, 2)) is Cmp.INDIFFERENT
    # listed beats unlisted; unlisted are mutually indifferent
    assert compare_for_agent(g.preferences[2], F(0), F(1, 3)) is Cmp.BETTER
    assert compare_for_agent(g.preferences[2], F(1, 3), F(1)) is Cmp.INDIFFERENT
    with pytest.raises(NotInDomainError):
        compare_for_agent(g.preferences[2], F(1, 7), F(0))


def test_preference_flags():
    theta = build_theta_set(1, 2)
    strict = PreferenceOrder([[F(1, 2)], [F(0)], [F(1)]], theta)
    assert strict.is_strict and not strict.is_dichotomous
    assert PreferenceOrder([[F(1, 2), F(0)]], theta).is_dichotomous
    assert not PreferenceOrder([[F(1, 2)], [F(0)]], theta).is_strict
    with pytest.raises(GameError):
        PreferenceOrder([[F(0)], [F(0), F(1)]], theta)
    with pytest.raises(GameError):
        PreferenceOrder([[]], theta)


def test_singleton_ratio_must_be_listed():
    with pytest.raises(GameError):
        Game(Variant.HDG2, [0, 1], [[[F(1, 2)], [F(1)]], [[F(1, 2)], [F(1)]]])


@given(st.integers(0, 2**32))
def test_comparison_is_total_preorder(seed):
    rng = random.Random(seed)
    g = random_hdg(rng, rng.randint(2, 6))
    pref = g.preferences[rng.randrange(g.n)]
    pts = [rng.choice(g.theta.ratios) for _ in range(3)]
    a, b, c = pts
    assert compare_for_agent(pref, a, a) is Cmp.INDIFFERENT
    assert compare_for_agent(pref, a, b) == -compare_for_agent(pref, b, a)
    if compare_for_agent(pref, a, b) >= 0 and compare_for_agent(pref, b, c) >= 0:
        assert compare_for_agent(pref, a, c) >= 0


# outcomes ---------------------------------------------------------------------


def test_validate_outcome_examples():
    g = canonical_instance("example-3-no-is")
    with pytest.raises(OverlappingCoalitionsError):
        validate_outcome(g, [{0, 1}, {1, 2}])
    with pytest.raises(UncoveredAgentError):
        validate_outcome(g, [{0}, {1}])
    with pytest.raises(UnknownAgentError):
        validate_outcome(g, [{0, 1, 2}, {3}])
    validate_outcome(g, [{0, 1, 2}])


def test_outcome_is_canonical():
    a = Outcome([[3, 1], [0], [2, 4]])
    b = Outcome.from_labels([1, 0, 2, 0, 2])
    assert a == b
    assert a.as_lists() == [[0], [1, 3], [2, 4]]
    assert a.coalition_of == (0, 1, 2, 1, 2)


@given(st.integers(0, 2**32))
def test_ratios_of_outcomes_lie_in_theta(seed):
    rng = random.Random(seed)
    g = random_hdg(rng, rng.randint(2, 9))
    outcome = sample_uniform_partition(g.n, rng)
    for c, counts in zip(outcome.coalitions, outcome.class_counts(g)):
        assert coalition_ratio(c, g) in g.theta
        assert counts == g.counts_of(c)


# deviations -------------------------------------------------------------------


def test_minimal_game_blue_deviates_to_red():
    g = canonical_instance("minimal-no-ns")
    o = Outcome.singletons(2)
    assert find_deviation(g, o, 1, Concept.NS) == Deviation(1, 0, Concept.NS)
    # under IS the red agent vetoes
    assert find_deviation(g, o, 1, Concept.IS) is None


def test_example_1_mid_run_deviation():
    g = canonical_instance("example-1")
    # published {{1,4},{2},{3},{5}} -> ours {{0,3},{1},{2},{4}}; agent 5 is ours 4
    o = Outcome([[0, 3], [1], [2], [4]])
    assert find_deviation(g, o, 4, Concept.IS) == Deviation(4, 0, Concept.IS)


def test_example_2_grand_coalition_has_no_ns_deviation():
    g = canonical_instance("example-2")
    grand = Outcome.grand(5)
    assert all(find_deviation(g, grand, i, "ns") is None for i in g.agents)


def test_deviation_to_empty_is_scanned_last():
    g = Game(Variant.HDG2, [0, 1, 1], [[[F(1)], [F(1, 2)]], [[F(1, 2)], [F(0)]], [[F(0)], [F(1, 2)]]])
    o = Outcome([[0, 1], [2]])
    devs = [d for d in all_deviations(g, o, "NS") if d.agent == 0]
    assert devs == [Deviation(0, EMPTY, Concept.NS)]
    assert apply_deviation(o, devs[0]) == Outcome.singletons(3)


def _brute_deviations(game, outcome, concept):
    """Deviations straight from the definition, without the scan machinery."""
    out = []
    for i in game.agents:
        home = outcome.coalitions[outcome.coalition_of[i]]
        cur = coalition_ratio(home, game)
        pref = game.preferences[i]
        targets = list(enumerate(outcome.coalitions)) + ([(EMPTY, frozenset())] if len(home) > 1 else [])
        for cid, c in targets:
            if cid == outcome.coalition_of[i]:
                continue
            new = coalition_ratio(c | {i}, game)
            if not pref.strictly_prefers(new, cur):
                continue
            if concept == "IS" and c and not all(
                game.preferences[j].weakly_prefers(new, coalition_ratio(c, game)) for j in c
            ):
                continue
            out.append(Deviation(i, cid, Concept(concept)))
    return out


@given(st.integers(0, 2**32))
def test_deviations_match_definition(seed):
    rng = random.Random(seed)
    g = random_hdg(rng, rng.randint(2, 8))
    o = sample_uniform_partition(g.n, rng)
    for concept in ("NS", "IS"):
        assert all_deviations(g, o, concept) == _brute_deviations(g, o, concept)


@given(st.integers(0, 2**32))
def test_is_deviation_implies_ns_deviation(seed):
    rng = random.Random(seed)
    g = random_hdg(rng, rng.randint(2, 8))
    o = sample_uniform_partition(g.n, rng)
    ns = {(d.agent, d.target) for d in all_deviations(g, o, "NS")}
    for d in all_deviations(g, o, "IS"):
        assert (d.agent, d.target) in ns
        assert is_valid_deviation(g, o, d)


# pareto -------------------------------------------------------------------------


def test_pareto_example_2():
    g = canonical_instance("example-2")
    assert pareto_dominates(g, Outcome.grand(5), Outcome.singletons(5))
    assert not pareto_dominates(g, Outcome.singletons(5), Outcome.grand(5))


@given(st.integers(0, 2**32))
def test_pareto_matches_pairwise_check(seed):
    rng = random.Random(seed)
    g = random_hdg(rng, 5)
    a, b = sample_uniform_partition(5, rng), sample_uniform_partition(5, rng)
    assert not pareto_dominates(g, a, a)
    ra = [coalition_ratio(a.coalitions[a.coalition_of[i]], g) for i in g.agents]
    rb = [coalition_ratio(b.coalitions[b.coalition_of[i]], g) for i in g.agents]
    weak = all(g.preferences[i].weakly_prefers(ra[i], rb[i]) for i in g.agents)
    strict = any(g.preferences[i].strictly_prefers(ra[i], rb[i]) for i in g.agents)
    assert pareto_dominates(g, a, b) == (weak and strict)


def test_pareto_exhaustive_on_example_1():
    g = canonical_instance("example-1")
    parts = [Outcome(p) for p in enumerate_partitions(5)]
    dominated = sum(1 for a, b in product(parts, parts) if pareto_dominates(g, a, b))
    # frozen: an independent rank-vector comparison over all 52 x 52 pairs
    assert dominated == 590

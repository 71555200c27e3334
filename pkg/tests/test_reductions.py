from fractions import Fraction as F
from math import gcd

import pytest

from hdgames.core import Game, GameError, Outcome, Variant, coalition_ratio
from hdgames.oracle import X3CInstance, brute_force_stable, count_stable, enumerate_partitions
from hdgames.reductions import (
    NotACoverError,
    anonymous_game,
    anonymous_to_khdg,
    canonical_instance,
    cover_to_is_outcome,
    cover_to_ns_outcome,
    dichotomous_anonymous_game,
    f_map,
    reduce_x3c_to_is_5tuple,
    reduce_x3c_to_ns_hdg,
    set_ratio,
)
from hdgames.stability import check_stability

YES = X3CInstance(3, [[1, 2, 3]])
NO = X3CInstance(3, [])


def test_f_map_values():
    assert [f_map(j) for j in (1, 2, 3, 4)] == [1, 2, 4, 5]
    values = [f_map(j) for j in range(1, 101)]
    assert len(set(values)) == 100
    assert all(v % 3 for v in values)
    with pytest.raises(ValueError):
        f_map(0)


def test_ratio_guards():
    for j in range(1, 51):
        a, b = 2 * f_map(j) + 3, 2 * f_map(j) + 6
        assert gcd(a, b) == 1
        for i in range(1, 51):
            other = F(2 * f_map(i) + 4, 2 * f_map(i) + 7)
            assert set_ratio(j) != other
            assert other != F(1, j + 1)


def test_ns_reduction_shape():
    art = reduce_x3c_to_ns_hdg(YES)
    g = art.game
    assert g.n == 11 and list(g.class_sizes) == [8, 3]
    assert art.role_counts() == {"set": 3, "filling": 5, "stalking": 3}


def test_ns_cover_outcome():
    art = reduce_x3c_to_ns_hdg(YES)
    o = cover_to_ns_outcome(art, [[1, 2, 3]])
    assert sorted(map(len, o.coalitions)) == [1, 1, 1, 8]
    p1 = max(o.coalitions, key=len)
    assert coalition_ratio(p1, art.game) == F(5, 8) == set_ratio(1)
    assert check_stability(art.game, o, "NS").stable
    with pytest.raises(NotACoverError):
        cover_to_ns_outcome(art, [[1, 2, 4]])


@pytest.mark.parametrize("flags", [{}, {"strict": True}, {"dichotomous": True}])
def test_ns_reduction_yes_and_no(flags):
    yes = reduce_x3c_to_ns_hdg(YES, **flags).game
    found = brute_force_stable(yes, "NS")
    # frozen from the oracle: the set coalition plus the stalkers' block
    assert found == Outcome([list(range(8)), [8, 9, 10]])
    assert brute_force_stable(reduce_x3c_to_ns_hdg(NO, **flags).game, "NS") is None


@pytest.mark.slow
def test_ns_reduction_oracle_counts():
    assert count_stable(reduce_x3c_to_ns_hdg(YES).game, "NS") == 5
    assert count_stable(reduce_x3c_to_ns_hdg(YES, strict=True).game, "NS") == 5
    assert count_stable(reduce_x3c_to_ns_hdg(YES, dichotomous=True).game, "NS") == 280


def test_dichotomous_stalkers_must_not_approve_being_alone():
    # with the whole individually-rational part approved, the all-red / all-blue
    # split is NS even without a cover
    art = reduce_x3c_to_ns_hdg(NO, dichotomous=True)
    loose = [p.tiers for p in art.game.preferences]
    for j, agent in art.stalking.items():
        loose[agent] = [[F(1, j + 1), F(1)]]
    game = Game(Variant.HDG2, art.game.class_of, [[list(t) for t in p] for p in loose])
    reds = [i for i in game.agents if game.class_of[i] == 0]
    blues = [i for i in game.agents if game.class_of[i] == 1]
    assert check_stability(game, Outcome([reds, blues]), "NS").stable


def test_strict_and_dichotomous_are_exclusive():
    with pytest.raises(GameError):
        reduce_x3c_to_ns_hdg(YES, strict=True, dichotomous=True)


def test_is_reduction_shape_and_cover():
    art = reduce_x3c_to_is_5tuple(YES)
    assert art.game.n == 7
    assert art.role_counts() == {"set": 3, "fraction": 1, "penalizing-g": 1, "penalizing-y": 1, "penalizing-w": 1}
    o = cover_to_is_outcome(art, [[1, 2, 3]])
    assert check_stability(art.game, o, "IS").stable
    g, y, w = (art.penalizing[c] for c in "gyw")
    assert frozenset({g}) in o.coalitions and frozenset({y, w}) in o.coalitions
    block = [c for c in o.coalitions if art.fraction[1] in c][0]
    assert sum(art.game.class_of[i] == 0 for i in block) == 1 and len(block) == 1 + 3
    with pytest.raises(NotACoverError):
        cover_to_is_outcome(art, [])


def test_redundant_agent_count():
    inst = X3CInstance(6, [[1, 2, 3], [4, 5, 6], [1, 2, 4]])
    art = reduce_x3c_to_is_5tuple(inst)
    assert art.role_counts()["redundant"] == 0 + 1 + 2
    assert art.role_counts()["fraction"] == 3


@pytest.mark.parametrize("strict", [False, True])
def test_is_reduction_yes_and_no(strict):
    yes = reduce_x3c_to_is_5tuple(YES, strict=strict).game
    # frozen from the oracle, which finds exactly one IS outcome
    assert brute_force_stable(yes, "IS") == Outcome([[0, 1, 2, 3], [4], [5, 6]])
    assert count_stable(yes, "IS") == 1
    assert brute_force_stable(reduce_x3c_to_is_5tuple(NO, strict=strict).game, "IS") is None


def test_artifacts_reject_foreign_covers():
    with pytest.raises(GameError):
        cover_to_is_outcome(reduce_x3c_to_ns_hdg(YES), [[1, 2, 3]])
    with pytest.raises(GameError):
        cover_to_ns_outcome(reduce_x3c_to_is_5tuple(YES), [[1, 2, 3]])


# anonymous games ---------------------------------------------------------------


def test_anonymous_embedding_maps_sizes_to_fractions():
    g = anonymous_game([[[2], [1]], [[3], [2], [1]], [[1]]])
    k = anonymous_to_khdg(g)
    assert k.variant is Variant.KHDG and k.num_classes == 3
    assert k.preferences[1].strictly_prefers(F(1, 3), F(1, 2))
    assert dichotomous_anonymous_game([1, 1]).preferences[0].is_dichotomous
    singles = anonymous_to_khdg(dichotomous_anonymous_game([1, 1]))
    assert all(set(p.tiers[0]) == {F(1)} for p in singles.preferences)


@pytest.mark.parametrize("orders", [
    [[[2], [1]], [[3], [1]], [[1], [3]]],
    [[[4], [2], [1]], [[1]], [[2], [1]], [[3], [1]]],
    [[[2]], [[3], [2], [1]], [[1]], [[5], [2], [1]], [[2], [1]]],
    [[[2], [1]], [[1], [6]], [[3], [2], [1]], [[6], [1]], [[2]], [[4], [1]]],
])
def test_anonymous_embedding_preserves_stability(orders):
    src = anonymous_game(orders)
    img = anonymous_to_khdg(src)
    for p in enumerate_partitions(src.n):
        o = Outcome(p)
        for concept in ("NS", "IS"):
            assert check_stability(src, o, concept).stable == check_stability(img, o, concept).stable


def test_canonical_instances():
    ex1 = canonical_instance("example-1")
    assert list(ex1.class_sizes) == [2, 3]
    ex3 = canonical_instance("example-3-no-is")
    assert ex3.variant is Variant.KTUPLE and list(ex3.class_sizes) == [1, 1, 1]
    assert list(canonical_instance("minimal-no-ns").class_sizes) == [1, 1]
    with pytest.raises(GameError):
        canonical_instance("example-9")

import json
import random

import pytest
from hypothesis import given, strategies as st

from conftest import random_hdg
from hdgames import io
from hdgames.core import GameError, Outcome
from hdgames.oracle import X3CInstance
from hdgames.reductions import CANONICAL_NAMES, canonical_instance, dichotomous_anonymous_game
from hdgames.samplers import sample_game


def _round_trip(game):
    doc = json.loads(io.dump(io.game_to_dict(game)))
    return io.game_from_dict(doc)


@pytest.mark.parametrize("name", CANONICAL_NAMES)
def test_canonical_round_trip(name):
    g = canonical_instance(name)
    h = _round_trip(g)
    assert h.variant is g.variant and h.class_of == g.class_of and h.preferences == g.preferences


def test_anonymous_and_symsp_round_trip():
    g = dichotomous_anonymous_game([1, 2, 3, 0])
    assert _round_trip(g).preferences == g.preferences
    s = sample_game("symSP", 3, 2, seed=4)
    assert list(_round_trip(s).peaks) == list(s.peaks)


@given(st.integers(0, 2**32))
def test_random_round_trip(seed):
    g = random_hdg(random.Random(seed), 7)
    assert _round_trip(g).preferences == g.preferences


def test_ratios_are_exact_strings():
    doc = io.game_to_dict(canonical_instance("example-1"))
    assert doc["agents"][0]["tiers"] == [["1/2", "2/3"], ["0/1"]]
    assert doc["classes"] == [2, 3]


def test_malformed_documents():
    doc = io.game_to_dict(canonical_instance("example-1"))
    bad = dict(doc, classes=[3, 2])
    with pytest.raises(GameError):
        io.game_from_dict(bad)
    with pytest.raises(GameError):
        io.game_from_dict({"agents": []})
    floats = json.loads(json.dumps(doc))
    floats["agents"][0]["tiers"][0][0] = 0.5
    with pytest.raises(GameError):
        io.game_from_dict(floats)


def test_outcome_and_x3c_round_trip(tmp_path):
    o = Outcome([[0, 3], [1, 2]])
    assert io.outcome_from_dict(io.outcome_to_dict(o, True, "IS"), 4) == o
    with pytest.raises(GameError):
        io.outcome_from_dict(io.outcome_to_dict(None), 4)
    inst = X3CInstance(6, [[1, 2, 3], [4, 5, 6]])
    path = tmp_path / "x.json"
    io.dump(inst.to_dict(), path)
    assert io.load_x3c(path) == inst

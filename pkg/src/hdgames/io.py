"""JSON encoding of games, outcomes and X3C instances.

Game schema::

    {"variant": "HDG2", "classes": [r, b],
     "agents": [{"class": 1, "tiers": [["1/2", "2/3"], ["0/1"]], "dichotomous": false}, ...]}

Ratios are exact ``"p/q"`` strings; k-tuple points are lists of such
strings; anonymous points are plain integer sizes.  symSP games add a
``"peak"`` (the real-valued ideal ratio) to every agent.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import Game, GameError, Outcome, Variant, format_ratio, parse_ratio
from .oracle import X3CInstance


def _encode_point(variant: Variant, point):
    if variant is Variant.ANONYMOUS:
        return int(point)
    if variant is Variant.KTUPLE:
        return [format_ratio(x) for x in point]
    return format_ratio(point)


def _decode_point(variant: Variant, raw):
    if variant is Variant.ANONYMOUS:
        if not isinstance(raw, int):
            raise GameError(f"anonymous points are integer sizes, got {raw!r}")
        return raw
    if variant is Variant.KTUPLE:
        return tuple(parse_ratio(x) for x in raw)
    if not isinstance(raw, str):
        raise GameError(f"ratios must be 'p/q' strings, got {raw!r}")
    return parse_ratio(raw)


def _point_key(p):
    if isinstance(p, tuple):
        return tuple(Fraction(x) for x in p)
    return Fraction(p)


def game_to_dict(game: Game, meta: dict | None = None) -> dict:
    agents = []
    for i, pref in enumerate(game.preferences):
        entry = {
            "class": game.class_of[i],
            "tiers": [[_encode_point(game.variant, p) for p in sorted(t, key=_point_key)] for t in pref.tiers],
            "dichotomous": pref.is_dichotomous,
        }
        if game.peaks is not None:
            entry["peak"] = game.peaks[i]
        agents.append(entry)
    out = {"variant": game.variant.value, "classes": list(game.class_sizes), "agents": agents}
    if meta:
        out["meta"] = meta
    return out


def game_from_dict(data: dict) -> Game:
    try:
        variant = Variant(data["variant"])
        agents = data["agents"]
        classes = [int(c) for c in data["classes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GameError(f"malformed game document: {exc}") from exc
    class_of = [int(a["class"]) for a in agents]
    tiers = [[[_decode_point(variant, p) for p in t] for t in a["tiers"]] for a in agents]
    peaks = [a["peak"] for a in agents] if agents and all("peak" in a for a in agents) else None
    game = Game(variant, class_of, tiers, num_classes=len(classes), peaks=peaks)
    if list(game.class_sizes) != classes:
        raise GameError(f"class sizes {classes} disagree with agent classes {list(game.class_sizes)}")
    for i, a in enumerate(agents):
        if "dichotomous" in a and bool(a["dichotomous"]) != game.preferences[i].is_dichotomous:
            raise GameError(f"agent {i}: dichotomous flag disagrees with its tiers")
    return game


def outcome_to_dict(outcome: Outcome | None, stable: bool | None = None, concept: str | None = None) -> dict:
    return {
        "coalitions": None if outcome is None else outcome.as_lists(),
        "stable": stable,
        "concept": concept,
    }


def outcome_from_dict(data: dict, n: int) -> Outcome:
    coalitions = data["coalitions"] if isinstance(data, dict) else data
    if coalitions is None:
        raise GameError("document holds no outcome")
    return Outcome(coalitions, n)


def dump(obj: dict, path: "str | Path | None" = None) -> str:
    text = json.dumps(obj, indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load(path: "str | Path") -> dict:
    return json.loads(Path(path).read_text())


def load_game(path: "str | Path") -> Game:
    return game_from_dict(load(path))


def load_x3c(path: "str | Path") -> X3CInstance:
    return X3CInstance.from_dict(load(path))

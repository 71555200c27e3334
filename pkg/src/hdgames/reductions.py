"""Hardness-reduction instance builders and the published small games.

Both reductions start from an exact-cover-by-3-sets instance with ground set
``{1..m}`` and sets ``A_1..A_k``.  Agent ids are assigned in a fixed order
recorded in :attr:`ReductionArtifact.roles`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Game, GameError, Outcome, Variant, build_theta_set
from .oracle import X3CError, X3CInstance


class NotACoverError(GameError):
    pass


def f_map(j: int) -> int:
    """``2j - 1 - floor(j/2)``: maps 1, 2, 3, ... onto the integers not divisible by 3."""
    if j < 1:
        raise ValueError("j must be positive")
    return 2 * j - 1 - j // 2


def set_ratio(j: int) -> Fraction:
    """Red fraction of the coalition encoding set ``A_j`` in the NS reduction."""
    return Fraction(2 * f_map(j) + 3, 2 * f_map(j) + 6)


@dataclass
class ReductionArtifact:
    source: X3CInstance
    game: Game
    roles: tuple[str, ...]
    target: str
    set_agent: dict[int, int] = field(default_factory=dict)        # element x -> agent
    filling: dict[int, list[int]] = field(default_factory=dict)    # set j -> agents (NS) / redundant (IS)
    stalking: dict[int, int] = field(default_factory=dict)         # NS: j -> agent
    fraction: dict[int, int] = field(default_factory=dict)         # IS: set j -> red agent
    penalizing: dict[str, int] = field(default_factory=dict)       # IS: "g"/"y"/"w" -> agent

    def role_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.roles:
            out[r] = out.get(r, 0) + 1
        return out

    def roles_dict(self) -> dict:
        return {
            "target": self.target,
            "roles": list(self.roles),
            "set_agent": {str(x): a for x, a in self.set_agent.items()},
            "filling": {str(j): a for j, a in self.filling.items()},
            "stalking": {str(j): a for j, a in self.stalking.items()},
            "fraction": {str(j): a for j, a in self.fraction.items()},
            "penalizing": dict(self.penalizing),
        }


def _cover_indices(instance: X3CInstance, cover: Sequence) -> list[int]:
    if not instance.is_cover(cover):
        raise NotACoverError(f"{[sorted(c) for c in cover]} is not an exact cover")
    return sorted(instance.index_of(c) for c in cover)


def _finish_tiers(tiers: list[list], strict: bool, dichotomous: bool, domain: Sequence) -> list[list]:
    if dichotomous:
        return [[p for t in tiers for p in t]]
    if strict:
        # indifferences are broken in list order; everything unlisted goes below, ascending
        listed = [p for t in tiers for p in t]
        rest = [p for p in domain if p not in set(listed)]
        return [[p] for p in listed + rest]
    return tiers


# ---------------------------------------------------------------------------
# X3C -> Nash stability in two-class games


def reduce_x3c_to_ns_hdg(instance: X3CInstance, *, strict: bool = False, dichotomous: bool = False) -> ReductionArtifact:
    """Two-class game with an NS outcome iff ``instance`` has an exact cover.

    Agents: blue set agent ``b_x`` per element, ``2f(j)+3`` red filling agents
    per set, and a red stalking agent ``z_j`` for each ``j`` in ``1..m``.
    """
    if strict and dichotomous:
        raise GameError("choose at most one of strict and dichotomous")
    m, k = instance.m, instance.k
    reds = sum(2 * f_map(j) + 3 for j in range(1, k + 1)) + m
    n = reds + m
    theta = build_theta_set(reds, n) if n else None
    domain = theta.ratios if theta else ()

    class_of: list[int] = []
    tiers: list[list] = []
    roles: list[str] = []
    art = ReductionArtifact(instance, None, (), "ns-hdg")  # type: ignore[arg-type]

    for x in range(1, m + 1):
        art.set_agent[x] = len(class_of)
        class_of.append(1)
        roles.append("set")
        top = [set_ratio(j) for j in instance.containing(x)]
        raw = ([top] if top else []) + [[Fraction(0)]]
        if strict:
            raw = [[r] for r in top] + [[Fraction(0)]]
        tiers.append(_finish_tiers(raw, strict, dichotomous, domain))
    for j in range(1, k + 1):
        art.filling[j] = []
        for _ in range(2 * f_map(j) + 3):
            art.filling[j].append(len(class_of))
            class_of.append(0)
            roles.append("filling")
            tiers.append(_finish_tiers([[set_ratio(j)], [Fraction(1)]], strict, dichotomous, domain))
    for j in range(1, m + 1):
        art.stalking[j] = len(class_of)
        class_of.append(0)
        roles.append("stalking")
        if dichotomous:
            # approving 1 as well would make the all-red/all-blue split NS on every instance
            tiers.append([[Fraction(1, j + 1)]])
        else:
            tiers.append(_finish_tiers([[Fraction(1, j + 1)], [Fraction(1)]], strict, dichotomous, domain))

    if not class_of:
        raise X3CError("empty instance produces an empty game")
    art.game = Game(Variant.HDG2, class_of, tiers)
    art.roles = tuple(roles)
    return art


def cover_to_ns_outcome(artifact: ReductionArtifact, cover: Sequence) -> Outcome:
    """The NS outcome built from an exact cover: one coalition per chosen set, rest alone."""
    if artifact.target != "ns-hdg":
        raise GameError("artifact does not come from the NS reduction")
    inst = artifact.source
    used: set[int] = set()
    blocks = []
    for j in _cover_indices(inst, cover):
        block = [artifact.set_agent[x] for x in sorted(inst.sets[j - 1])] + artifact.filling[j]
        used.update(block)
        blocks.append(block)
    blocks += [[i] for i in artifact.game.agents if i not in used]
    return Outcome(blocks, artifact.game.n)


# ---------------------------------------------------------------------------
# X3C -> individual stability in 5-tuple games

RED, BLUE, GREEN, YELLOW, WHITE = range(5)


def _tup(*xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


def set_tuple(j: int) -> tuple[Fraction, ...]:
    """Class fractions of the coalition encoding ``A_j``: one red among ``j+3`` agents."""
    return _tup(Fraction(1, j + 3), Fraction(j + 2, j + 3), 0, 0, 0)


def reduce_x3c_to_is_5tuple(instance: X3CInstance, *, strict: bool = False) -> ReductionArtifact:
    """Five-class tuple game with an IS outcome iff ``instance`` has an exact cover.

    Tuples are per-class fractions of the coalition size, which induce the
    same indifference classes as within-class ratios.
    """
    m, k = instance.m, instance.k
    third, half = Fraction(1, 3), Fraction(1, 2)
    bgy = _tup(0, third, third, third, 0)
    bg = _tup(0, half, half, 0, 0)
    blue_only = _tup(0, 1, 0, 0, 0)

    class_of: list[int] = []
    tiers: list[list] = []
    roles: list[str] = []
    art = ReductionArtifact(instance, None, (), "is-5tuple")  # type: ignore[arg-type]

    for x in range(1, m + 1):
        art.set_agent[x] = len(class_of)
        class_of.append(BLUE)
        roles.append("set")
        top = [set_tuple(j) for j in instance.containing(x)]
        head = [[t] for t in top] if strict else ([top] if top else [])
        tiers.append(head + [[bgy], [bg], [blue_only]])
    for j in range(1, k + 1):
        art.fraction[j] = len(class_of)
        class_of.append(RED)
        roles.append("fraction")
        tiers.append([[set_tuple(j)], [_tup(1, 0, 0, 0, 0)]])
    for j in range(1, k + 1):
        art.filling[j] = []
        for _ in range(j - 1):
            art.filling[j].append(len(class_of))
            class_of.append(BLUE)
            roles.append("redundant")
            tiers.append([[set_tuple(j)], [blue_only]])
    gw = _tup(0, 0, half, 0, half)
    yw = _tup(0, 0, 0, half, half)
    for name, cls, pref in (
        ("g", GREEN, [[gw], [bgy], [bg], [_tup(0, 0, 1, 0, 0)]]),
        ("y", YELLOW, [[bgy], [yw], [_tup(0, 0, 0, 1, 0)]]),
        ("w", WHITE, [[yw], [gw], [_tup(0, 0, 0, 0, 1)]]),
    ):
        art.penalizing[name] = len(class_of)
        class_of.append(cls)
        roles.append(f"penalizing-{name}")
        tiers.append(pref)

    art.game = Game(Variant.KTUPLE, class_of, tiers, num_classes=5)
    art.roles = tuple(roles)
    return art


def cover_to_is_outcome(artifact: ReductionArtifact, cover: Sequence) -> Outcome:
    """IS outcome from an exact cover: set coalitions, singletons, ``{g}`` and ``{y, w}``."""
    if artifact.target != "is-5tuple":
        raise GameError("artifact does not come from the IS reduction")
    inst = artifact.source
    used: set[int] = set()
    blocks = []
    for j in _cover_indices(inst, cover):
        block = [artifact.set_agent[x] for x in sorted(inst.sets[j - 1])]
        block += [artifact.fraction[j]] + artifact.filling[j]
        used.update(block)
        blocks.append(block)
    g, y, w = (artifact.penalizing[c] for c in "gyw")
    blocks += [[g], [y, w]]
    used.update((g, y, w))
    blocks += [[i] for i in artifact.game.agents if i not in used]
    return Outcome(blocks, artifact.game.n)


# ---------------------------------------------------------------------------
# anonymous games as k-HDGs


def anonymous_to_khdg(game: Game) -> Game:
    """Put every agent in its own class; size ``s`` becomes own-class fraction ``1/s``."""
    if game.variant is not Variant.ANONYMOUS:
        raise GameError("expected an anonymous game")
    tiers = [[[Fraction(1, s) for s in tier] for tier in pref.tiers] for pref in game.preferences]
    return Game(Variant.KHDG, list(range(game.n)), tiers, num_classes=game.n)


def anonymous_game(orders: Sequence[Sequence[Sequence[int]]]) -> Game:
    """Anonymous game from per-agent tiers of coalition sizes."""
    return Game(Variant.ANONYMOUS, [0] * len(orders), [list(map(list, o)) for o in orders])


def dichotomous_anonymous_game(approved: Sequence[int]) -> Game:
    """Anonymous game where agent i approves exactly size ``approved[i]`` (none if out of range)."""
    n = len(approved)
    return anonymous_game([[[s]] if 1 <= s <= n else [] for s in approved])


# ---------------------------------------------------------------------------
# published games

CANONICAL_NAMES = ("minimal-no-ns", "example-1", "example-2", "example-3-no-is")


def _hdg(class_of, tiers) -> Game:
    return Game(Variant.HDG2, class_of, [[[Fraction(x) for x in t] for t in agent] for agent in tiers])


def canonical_instance(name: str) -> Game:
    """The small games used as published worked examples.

    Agent ids are 0-based; in the examples with numbered agents, our agent
    ``i`` is the example's agent ``i + 1``.
    """
    F = Fraction
    if name == "minimal-no-ns":
        # red (0) prefers to be alone; blue (1) prefers to be with the red agent
        return _hdg([0, 1], [[[1]], [[F(1, 2)], [0]]])
    if name == "example-1":
        # blue 0,1,2 and red 3,4
        return _hdg(
            [1, 1, 1, 0, 0],
            [
                [[F(2, 3), F(1, 2)], [0]],
                [[F(2, 3)], [F(1, 2)], [0]],
                [[F(1, 4)], [0]],
                [[F(2, 3)], [F(1, 2)], [1]],
                [[F(2, 3)], [1]],
            ],
        )
    if name == "example-2":
        # blue 0..3 like 1/5 over 0; red 4 has single-peaked strict order with peak 1/5
        blue = [[F(1, 5)], [0]]
        red = [[F(1, 5)], [F(1, 4)], [F(1, 3)], [F(1, 2)], [1], [0]]
        return _hdg([1, 1, 1, 1, 0], [blue, blue, blue, blue, red])
    if name == "example-3-no-is":
        h, t = F(1, 2), F(1, 3)
        r = [[(h, h, 0)], [(h, 0, h)], [(1, 0, 0)], [(t, t, t)]]
        b = [[(0, h, h)], [(h, h, 0)], [(0, 1, 0)], [(t, t, t)]]
        g = [[(h, 0, h)], [(0, h, h)], [(0, 0, 1)], [(t, t, t)]]
        norm = [[[tuple(F(x) for x in p) for p in tier] for tier in pref] for pref in (r, b, g)]
        return Game(Variant.KTUPLE, [0, 1, 2], norm, num_classes=3)
    raise GameError(f"unknown canonical instance {name!r}; choose from {', '.join(CANONICAL_NAMES)}")

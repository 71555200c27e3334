"""Welfare, coalition size and diversity of an outcome, averaged over agents."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Game, GameError, Outcome, Variant


class ModeMismatchError(GameError):
    pass


WELFARE_MODES = ("borda", "symmetric")


def borda_score(game: Game, agent: int, ratio: Fraction) -> int:
    """Number of theta ratios the agent ranks strictly below ``ratio``.

    Under ties this is the lower-bound convention: tied ratios do not count.
    """
    pref = game.preferences[agent]
    r = pref.rank(ratio)
    if r == pref.num_tiers:
        return 0
    return len(game.theta) - pref.count_through(r)


def average_welfare(game: Game, outcome: Outcome, mode: str = "borda") -> "Fraction | float":
    """Mean per-agent utility.

    ``borda``: normalised Borda score of the agent's coalition ratio, exact.
    ``symmetric``: ``1 - |ratio - peak|`` using the recorded real peaks.
    """
    if game.variant is not Variant.HDG2:
        raise GameError("welfare is defined for two-class games")
    counts = outcome.class_counts(game)
    ratios = [Fraction(c[0], sum(c)) for c in counts]
    if mode == "symmetric":
        if game.peaks is None:
            raise ModeMismatchError("symmetric welfare needs per-agent peaks")
        total = sum(1.0 - abs(float(ratios[outcome.coalition_of[i]]) - game.peaks[i]) for i in game.agents)
        return total / game.n
    if mode != "borda":
        raise ModeMismatchError(f"unknown welfare mode {mode!r}")
    span = len(game.theta) - 1
    if span == 0:
        return Fraction(1)
    total = sum(borda_score(game, i, ratios[outcome.coalition_of[i]]) for i in game.agents)
    return Fraction(total, span * game.n)


def average_size(outcome: Outcome) -> Fraction:
    return Fraction(sum(len(c) ** 2 for c in outcome.coalitions), outcome.n)


def diversity(ratio: Fraction) -> Fraction:
    return 1 - 2 * abs(Fraction(1, 2) - ratio)


def average_diversity(game: Game, outcome: Outcome) -> Fraction:
    if game.variant is not Variant.HDG2:
        raise GameError("diversity is defined for two-class games")
    total = Fraction(0)
    for c in outcome.class_counts(game):
        size = sum(c)
        total += size * diversity(Fraction(c[0], size))
    return total / outcome.n


@dataclass(frozen=True)
class MeasureReport:
    welfare: "Fraction | float"
    avg_size: Fraction
    avg_diversity: Fraction
    welfare_mode: str


def measure(game: Game, outcome: Outcome, mode: str | None = None) -> MeasureReport:
    """All three measures; the welfare mode defaults to symmetric when peaks are recorded."""
    if mode is None:
        mode = "symmetric" if game.peaks is not None else "borda"
    return MeasureReport(
        average_welfare(game, outcome, mode),
        average_size(outcome),
        average_diversity(game, outcome),
        mode,
    )

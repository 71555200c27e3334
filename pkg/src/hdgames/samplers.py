"""Random single-peaked preferences over theta, and random games built from them.

uSP
    Uniform over all single-peaked strict orders.  Built worst-to-best: the
    worst remaining ratio of a single-peaked order is always an endpoint of
    the remaining interval, and either endpoint leaves the same number of
    completions, so a fair coin per step gives the uniform law.
upSP
    Uniform peak, then extend the ranked interval left or right with a fair
    coin (forced once one side is exhausted).
symSP
    Real peak drawn uniformly from [0, 1]; ratios ranked by distance to it,
    equidistant ratios tied.
"""

from __future__ import annotations

import bisect
import enum
import logging
import random
from fractions import Fraction
from typing import Sequence

from .core import Game, PreferenceOrder, ThetaSet, Variant, build_theta_set
from .rng import make_rng

log = logging.getLogger(__name__)


class Model(str, enum.Enum):
    USP = "uSP"
    UPSP = "upSP"
    SYMSP = "symSP"

    @classmethod
    def parse(cls, value: "str | Model") -> "Model":
        if isinstance(value, Model):
            return value
        for m in cls:
            if m.value.lower() == str(value).lower():
                return m
        raise ValueError(f"unknown preference model {value!r}")


def _usp(m: int, rng: random.Random) -> list[int]:
    """Positions in theta, best first."""
    lo, hi = 0, m - 1
    worst_first = []
    while lo < hi:
        if rng.random() < 0.5:
            worst_first.append(lo)
            lo += 1
        else:
            worst_first.append(hi)
            hi -= 1
    worst_first.append(lo)
    return worst_first[::-1]


def _upsp(m: int, rng: random.Random) -> list[int]:
    peak = rng.randrange(m)
    order = [peak]
    lo = hi = peak
    while len(order) < m:
        go_left = lo > 0 and (hi == m - 1 or rng.random() < 0.5)
        if go_left:
            lo -= 1
            order.append(lo)
        else:
            hi += 1
            order.append(hi)
    return order


def _closer(a: Fraction, b: Fraction, peak: float) -> int:
    """-1 if ``a`` is strictly closer to ``peak`` than ``b``, 1 if farther, 0 on a tie."""
    da, db = abs(float(a) - peak), abs(float(b) - peak)
    if abs(da - db) > 1e-9:
        return -1 if da < db else 1
    exact = Fraction(peak)
    da, db = abs(a - exact), abs(b - exact)
    return (da > db) - (da < db)


def _symsp_tiers(ratios: Sequence[Fraction], peak: float) -> list[list[int]]:
    """Positions in ``ratios`` grouped by exact distance to ``peak``, closest first."""
    hi = bisect.bisect_left([float(r) for r in ratios], peak)
    lo = hi - 1
    tiers: list[list[int]] = []
    m = len(ratios)
    while lo >= 0 or hi < m:
        if lo < 0:
            tiers.append([hi])
            hi += 1
        elif hi >= m:
            tiers.append([lo])
            lo -= 1
        else:
            c = _closer(ratios[lo], ratios[hi], peak)
            if c == 0:
                tiers.append([lo, hi])
                lo -= 1
                hi += 1
            elif c < 0:
                tiers.append([lo])
                lo -= 1
            else:
                tiers.append([hi])
                hi += 1
    return tiers


def sample_preference(
    model: "Model | str",
    theta: ThetaSet,
    seed: "int | random.Random | None" = 0,
    *,
    peak: float | None = None,
) -> PreferenceOrder:
    """One single-peaked preference over ``theta``.

    For symSP the real peak can be fixed with ``peak``; otherwise it is drawn.
    Use :func:`sample_symsp` to also get the drawn peak back.
    """
    model = Model.parse(model)
    rng = make_rng(seed)
    ratios = theta.ratios
    if not ratios:
        raise ValueError("theta must be non-empty")
    if model is Model.USP:
        return PreferenceOrder.from_indices([[i] for i in _usp(len(ratios), rng)], theta)
    if model is Model.UPSP:
        return PreferenceOrder.from_indices([[i] for i in _upsp(len(ratios), rng)], theta)
    return sample_symsp(theta, rng, peak=peak)[0]


def sample_symsp(theta: ThetaSet, seed=0, *, peak: float | None = None) -> tuple[PreferenceOrder, float]:
    rng = make_rng(seed)
    if peak is None:
        peak = rng.random()
    return PreferenceOrder.from_indices(_symsp_tiers(theta.ratios, peak), theta), peak


def is_single_peaked(pref: PreferenceOrder, theta: ThetaSet) -> bool:
    """Is there a peak rho in theta such that preference never increases moving away from it?"""
    ratios = theta.ratios
    ranks = [pref.rank(r) for r in ratios]
    best = min(ranks)
    for p, rp in enumerate(ranks):
        if rp != best:
            continue
        right = all(ranks[i] <= ranks[i + 1] for i in range(p, len(ranks) - 1))
        left = all(ranks[i] <= ranks[i - 1] for i in range(p, 0, -1))
        if left and right:
            return True
    return False


def sample_game(model: "Model | str", red: int, blue: int, seed: "int | random.Random | None" = 0) -> Game:
    """Two-class game with ``red`` red agents (ids first) and ``blue`` blue agents."""
    model = Model.parse(model)
    if red < 0 or blue < 0 or red + blue < 2:
        raise ValueError("need red, blue >= 0 and red + blue >= 2")
    rng = make_rng(seed)
    n = red + blue
    theta = build_theta_set(red, n)
    class_of = [0] * red + [1] * blue
    prefs = []
    peaks = [] if model is Model.SYMSP else None
    ties = 0
    for _ in range(n):
        if model is Model.SYMSP:
            pref, peak = sample_symsp(theta, rng)
            peaks.append(peak)
            ties += pref.num_tiers != len(theta)
        else:
            pref = sample_preference(model, theta, rng)
        prefs.append(pref)
    if ties:
        log.info("symSP draw produced %d preference(s) with ties", ties)
    return Game(Variant.HDG2, class_of, prefs, peaks=peaks)


def sample_dichotomous_game(red: int, blue: int, seed=0, approve: float = 0.5) -> Game:
    """Two-class game where each agent approves each ratio independently with prob ``approve``."""
    rng = make_rng(seed)
    n = red + blue
    theta = build_theta_set(red, n)
    prefs = []
    for _ in range(n):
        chosen = [r for r in theta if rng.random() < approve]
        prefs.append([chosen] if chosen else [])
    return Game(Variant.HDG2, [0] * red + [1] * blue, prefs)

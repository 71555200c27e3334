import random

import pytest
from hypothesis import HealthCheck, settings

from hdgames.core import Game, Variant, build_theta_set
from hdgames.samplers import sample_game

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_hdg(rng: random.Random, n: int, red: int | None = None, model: str | None = None) -> Game:
    """Small two-class game; a third of the time with random weak orders instead of single-peaked ones."""
    if red is None:
        red = rng.randint(0, n - 1)
    if model is None and rng.random() < 1 / 3:
        return random_weak_hdg(rng, red, n - red)
    return sample_game(model or rng.choice(["uSP", "upSP", "symSP"]), red, n - red, rng)


def random_weak_hdg(rng: random.Random, red: int, blue: int) -> Game:
    n = red + blue
    theta = build_theta_set(red, n)
    prefs = []
    for i in range(n):
        alone = theta[-1] if i < red else theta[0]
        listed = [r for r in theta if r != alone and rng.random() < 0.5]
        rng.shuffle(listed)
        cut = rng.randint(0, len(listed))
        better, worse = listed[:cut], listed[cut:]
        tiers = _chunk(rng, better) + [[alone]] + _chunk(rng, worse)
        prefs.append(tiers)
    return Game(Variant.HDG2, [0] * red + [1] * blue, prefs)


def _chunk(rng: random.Random, items: list) -> list[list]:
    out = []
    i = 0
    while i < len(items):
        step = rng.randint(1, 2)
        out.append(items[i:i + step])
        i += step
    return out


def random_ktuple(rng: random.Random, class_sizes: list[int]) -> Game:
    """k-tuple game whose agents rank a random sample of realisable tuples."""
    from itertools import product
    from fractions import Fraction

    k = len(class_sizes)
    class_of = [c for c, s in enumerate(class_sizes) for _ in range(s)]
    points = set()
    for counts in product(*(range(s + 1) for s in class_sizes)):
        size = sum(counts)
        if size:
            points.add(tuple(Fraction(c, size) for c in counts))
    points = sorted(points)
    prefs = []
    for c in class_of:
        alone = tuple(Fraction(int(j == c)) for j in range(k))
        own = [p for p in points if p[c] > 0 and p != alone]
        listed = rng.sample(own, rng.randint(0, min(4, len(own))))
        cut = rng.randint(0, len(listed))
        prefs.append([[p] for p in listed[:cut]] + [[alone]] + [[p] for p in listed[cut:]])
    return Game(Variant.KTUPLE, class_of, prefs, num_classes=k)


@pytest.fixture
def rng():
    return random.Random(12345)

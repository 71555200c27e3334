"""Exhaustive ground truth for small instances.

Set partitions are generated as restricted-growth strings (RGS) in
lexicographic order: ``a[0] = 0`` and ``a[i] <= 1 + max(a[:i])``.  Every
partition of ``0..n-1`` is produced exactly once, Bell(n) in total.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .core import Concept, Game, GameError, Outcome
from .stability import check_stability

MAX_ORACLE_AGENTS = 12
MAX_X3C_SETS = 20


class TooLargeError(GameError):
    pass


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """Yield every RGS of length ``n`` in lexicographic order.

    The same list object is mutated between yields; copy it if you keep it.
    """
    if n <= 0:
        return
    a = [0] * n
    # b[i] = 1 + max(a[:i]) is the largest value a[i] may take
    b = [1] * n
    while True:
        yield a
        j = n - 1
        while j > 0 and a[j] == b[j]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        top = b[j] + (a[j] == b[j])
        for k in range(j + 1, n):
            a[k] = 0
            b[k] = top


def enumerate_partitions(n: int) -> Iterator[list[list[int]]]:
    """All set partitions of ``0..n-1`` as lists of blocks, RGS order."""
    if n < 1:
        raise GameError("n must be at least 1")
    if n > MAX_ORACLE_AGENTS:
        raise TooLargeError(f"n = {n} exceeds the oracle cap of {MAX_ORACLE_AGENTS}")
    for rgs in restricted_growth_strings(n):
        blocks: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for agent, label in enumerate(rgs):
            blocks[label].append(agent)
        yield blocks


def bell(n: int) -> int:
    """Bell number via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def brute_force_stable(game: Game, concept: "Concept | str") -> Outcome | None:
    """First partition in RGS order that is stable under ``concept``, if any."""
    concept = Concept.parse(concept)
    if game.n > MAX_ORACLE_AGENTS:
        raise TooLargeError(f"n = {game.n} exceeds the oracle cap of {MAX_ORACLE_AGENTS}")
    return next(_stable_partitions(game, concept), None)


def count_stable(game: Game, concept: "Concept | str") -> int:
    return sum(1 for _ in _stable_partitions(game, Concept.parse(concept)))


def _stable_partitions(game: Game, concept: Concept) -> Iterator[Outcome]:
    """Stable partitions in RGS order.

    A partition in which some agent strictly prefers being alone is unstable
    under both concepts (moving to a new singleton needs nobody's consent), so
    such partitions are discarded from the raw labels before the full check.
    """
    n = game.n
    cls = game.class_of
    k = game.num_classes
    alone = [game.rank(i, game.singleton_counts(i)) for i in range(n)]
    tables: list[dict] = [{} for _ in range(n)]
    for rgs in restricted_growth_strings(n):
        blocks = max(rgs) + 1
        counts = [[0] * k for _ in range(blocks)]
        for i in range(n):
            counts[rgs[i]][cls[i]] += 1
        keys = [tuple(c) for c in counts]
        rational = True
        for i in range(n):
            key = keys[rgs[i]]
            r = tables[i].get(key)
            if r is None:
                r = tables[i][key] = game.rank(i, key)
            if r > alone[i]:
                rational = False
                break
        if not rational:
            continue
        outcome = Outcome.from_labels(rgs)
        if check_stability(game, outcome, concept).stable:
            yield outcome


# ---------------------------------------------------------------------------
# exact cover by 3-sets


class X3CError(GameError):
    pass


@dataclass(frozen=True)
class X3CInstance:
    """Ground set ``{1..m}`` and a list of 3-element subsets (indexed from 1)."""

    m: int
    sets: tuple[frozenset, ...]

    def __init__(self, m: int, sets: Sequence[Sequence[int]]):
        if m < 0 or m % 3:
            raise X3CError(f"ground set size must be a non-negative multiple of 3, got {m}")
        norm = []
        for s in sets:
            fs = frozenset(int(x) for x in s)
            if len(fs) != 3 or len(list(s)) != 3:
                raise X3CError(f"{sorted(s)} is not a 3-element set")
            if not all(1 <= x <= m for x in fs):
                raise X3CError(f"{sorted(fs)} has elements outside 1..{m}")
            if fs in norm:
                raise X3CError(f"duplicate set {sorted(fs)}")
            norm.append(fs)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sets", tuple(norm))

    @property
    def k(self) -> int:
        return len(self.sets)

    def containing(self, x: int) -> list[int]:
        """1-based indices of the sets containing element ``x``."""
        return [j for j, s in enumerate(self.sets, start=1) if x in s]

    def index_of(self, s) -> int:
        fs = frozenset(s)
        for j, t in enumerate(self.sets, start=1):
            if t == fs:
                return j
        raise X3CError(f"{sorted(fs)} is not one of the instance's sets")

    def is_cover(self, cover: Sequence) -> bool:
        chosen = [frozenset(c) for c in cover]
        if any(c not in self.sets for c in chosen):
            return False
        covered = [x for c in chosen for x in c]
        return len(covered) == self.m and set(covered) == set(range(1, self.m + 1))

    def to_dict(self) -> dict:
        return {"m": self.m, "sets": [sorted(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, data: dict) -> "X3CInstance":
        return cls(int(data["m"]), data.get("sets", []))


def brute_force_x3c(instance: X3CInstance) -> list[frozenset] | None:
    """Some sub-collection partitioning ``{1..m}``, or None.

    Tries every combination of ``m/3`` sets, in lexicographic index order.
    """
    if instance.k > MAX_X3C_SETS:
        raise TooLargeError(f"{instance.k} sets exceeds the cap of {MAX_X3C_SETS}")
    need = instance.m // 3
    universe = frozenset(range(1, instance.m + 1))
    for combo in combinations(instance.sets, need):
        union = frozenset().union(*combo)
        if union == universe and len(union) == instance.m:
            return list(combo)
    return None

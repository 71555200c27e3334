"""Games, coalitions, preference orders and deviations.

Every comparison in this module is exact: ratios are :class:`fractions.Fraction`
values and never pass through floating point.

Agents are the integers ``0..n-1``.  A coalition is summarised by its vector
of per-class member counts; what an agent cares about (its *point*) is derived
from that vector according to the game variant:

* ``HDG2``      -- fraction of red agents (class 0) in the coalition
* ``KHDG``      -- fraction of the agent's own class in the coalition
* ``KTuple``    -- tuple of per-class fractions of the coalition size
* ``Anonymous`` -- coalition size
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate
from math import gcd
from typing import Hashable, Iterable, Sequence

Ratio = Fraction

#: Target id used for a deviation to a fresh singleton coalition.
EMPTY = None


class Variant(str, enum.Enum):
    HDG2 = "HDG2"
    KTUPLE = "KTuple"
    KHDG = "KHDG"
    ANONYMOUS = "Anonymous"


class Concept(str, enum.Enum):
    NS = "NS"
    IS = "IS"

    @classmethod
    def parse(cls, value: "str | Concept") -> "Concept":
        if isinstance(value, Concept):
            return value
        return cls(value.upper())


class Cmp(enum.IntEnum):
    WORSE = -1
    INDIFFERENT = 0
    BETTER = 1


class GameError(ValueError):
    """Base class for malformed games, outcomes and queries."""


class InvalidBoundsError(GameError):
    pass


class EmptyCoalitionError(GameError):
    pass


class NotInDomainError(GameError):
    pass


class OutcomeError(GameError):
    pass


class OverlappingCoalitionsError(OutcomeError):
    pass


class UncoveredAgentError(OutcomeError):
    pass


class UnknownAgentError(OutcomeError):
    pass


# ---------------------------------------------------------------------------
# ratios


def parse_ratio(text: "str | int | Fraction") -> Fraction:
    """Parse an exact ``"p/q"`` string (or an int) into a Fraction in [0, 1]."""
    if isinstance(text, float):
        raise TypeError("ratios must be exact; got a float")
    if isinstance(text, (Fraction, int)):
        value = Fraction(text)
    else:
        num, _, den = str(text).partition("/")
        value = Fraction(int(num), int(den) if den else 1)
    if not 0 <= value <= 1:
        raise ValueError(f"ratio {text!r} is outside [0, 1]")
    return value


def format_ratio(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def point_key(p):
    """Hashable stand-in for a point.

    ``Fraction.__hash__`` runs a modular inverse on every call, which
    dominates lookups in large games; ratios are keyed by their lowest-terms
    ``(numerator, denominator)`` pair instead.  Integers map to ``(p, 1)`` so
    that ``1`` and ``Fraction(1)`` stay interchangeable.
    """
    t = type(p)
    if t is Fraction:
        return (p.numerator, p.denominator)
    if t is int:
        return (p, 1)
    if t is tuple:
        return tuple(point_key(x) for x in p)
    if isinstance(p, Fraction):
        return (p.numerator, p.denominator)
    if isinstance(p, int) and not isinstance(p, bool):
        return (int(p), 1)
    return p


class ThetaSet:
    """Sorted set of all red-fractions realisable by a non-empty coalition.

    Also serves as the sorted domain of k-HDG and anonymous preferences.
    """

    __slots__ = ("ratios", "keys", "_index")

    def __init__(self, ratios: Iterable):
        self.ratios = tuple(ratios)
        self.keys = tuple(point_key(r) for r in self.ratios)
        self._index = {k: i for i, k in enumerate(self.keys)}

    def __contains__(self, item) -> bool:
        return point_key(item) in self._index

    def __len__(self) -> int:
        return len(self.ratios)

    def __iter__(self):
        return iter(self.ratios)

    def __getitem__(self, i):
        return self.ratios[i]

    def __eq__(self, other):
        return isinstance(other, ThetaSet) and self.keys == other.keys

    def __hash__(self):
        return hash(self.keys)

    def __repr__(self):
        return f"ThetaSet({', '.join(map(_fmt_point, self.ratios))})"

    def index(self, ratio) -> int:
        try:
            return self._index[point_key(ratio)]
        except KeyError:
            raise NotInDomainError(f"{ratio} is not in theta") from None


@lru_cache(maxsize=256)
def build_theta_set(r_count: int, n: int) -> ThetaSet:
    """All fractions ``j/k`` with ``0 <= j <= r_count`` and ``max(j, 1) <= k <= n``."""
    if n < 1 or r_count < 0 or r_count > n:
        raise InvalidBoundsError(f"need 0 <= r_count <= n and n >= 1, got r_count={r_count}, n={n}")
    pairs = set()
    for k in range(1, n + 1):
        for j in range(0, min(r_count, k) + 1):
            g = gcd(j, k)
            pairs.add((j // g, k // g))
    return ThetaSet(sorted(Fraction(j, k) for j, k in pairs))


# ---------------------------------------------------------------------------
# preferences


class PreferenceOrder:
    """A weak order given as tiers (tier 0 is best).

    Points missing from every tier form an implicit bottom tier: they are
    mutually indifferent and strictly worse than anything listed.
    """

    __slots__ = ("_tiers", "domain", "_rank", "_frozen", "_cum")

    def __init__(self, tiers: Iterable[Iterable[Hashable]], domain=None):
        rank: dict = {}
        kept = []
        for i, tier in enumerate(tiers):
            tier = tuple(tier)
            if not tier:
                raise GameError("preference tiers must be non-empty")
            unique = []
            for point in tier:
                key = point_key(point)
                prev = rank.get(key)
                if prev == i:
                    continue
                if prev is not None:
                    raise GameError(f"{point!r} listed in more than one tier")
                if domain is not None and point not in domain:
                    raise NotInDomainError(f"{point!r} is outside the preference domain")
                rank[key] = i
                unique.append(point)
            kept.append(tuple(unique))
        self._tiers = tuple(kept)
        self.domain = domain
        self._rank = rank
        self._frozen = None
        self._cum = None

    @classmethod
    def from_ranking(cls, ranking: Sequence[Hashable], domain=None) -> "PreferenceOrder":
        """Strict order, best first."""
        return cls(([p] for p in ranking), domain)

    @classmethod
    def from_indices(cls, index_tiers: Sequence[Sequence[int]], domain: ThetaSet) -> "PreferenceOrder":
        """Tiers given as positions in ``domain``; skips per-point validation."""
        self = cls.__new__(cls)
        pts, keys = domain.ratios, domain.keys
        self._tiers = tuple([tuple([pts[i] for i in t]) for t in index_tiers])
        rank = {}
        for r, t in enumerate(index_tiers):
            for i in t:
                rank[keys[i]] = r
        if len(rank) != sum(map(len, self._tiers)) or not all(self._tiers):
            raise GameError("index tiers must be non-empty and pairwise disjoint")
        self._rank = rank
        self.domain = domain
        self._frozen = None
        self._cum = None
        return self

    def with_domain(self, domain) -> "PreferenceOrder":
        return PreferenceOrder(self._tiers, domain)

    @property
    def tiers(self) -> tuple[frozenset, ...]:
        if self._frozen is None:
            self._frozen = tuple(frozenset(t) for t in self._tiers)
        return self._frozen

    @property
    def num_tiers(self) -> int:
        return len(self._tiers)

    def tier_sizes(self) -> list[int]:
        return [len(t) for t in self._tiers]

    def count_through(self, r: int) -> int:
        """Number of listed points ranked in tiers ``0..r``."""
        if self._cum is None:
            self._cum = list(accumulate(map(len, self._tiers), initial=0))
        return self._cum[min(r + 1, len(self._tiers))]

    def rank(self, point) -> int:
        """Tier index of ``point``; lower is better, unlisted points share ``len(tiers)``."""
        r = self._rank.get(point_key(point))
        if r is not None:
            return r
        if self.domain is not None and point not in self.domain:
            raise NotInDomainError(f"{point!r} is outside the preference domain")
        return len(self._tiers)

    def ranks_over(self, domain: ThetaSet) -> list[int]:
        """``rank`` of every point of ``domain``, in domain order."""
        bottom = len(self._tiers)
        get = self._rank.get
        return [get(k, bottom) for k in domain.keys]

    def compare(self, a, b) -> Cmp:
        ra, rb = self.rank(a), self.rank(b)
        if ra < rb:
            return Cmp.BETTER
        if ra > rb:
            return Cmp.WORSE
        return Cmp.INDIFFERENT

    def weakly_prefers(self, a, b) -> bool:
        return self.rank(a) <= self.rank(b)

    def strictly_prefers(self, a, b) -> bool:
        return self.rank(a) < self.rank(b)

    def is_listed(self, point) -> bool:
        return point_key(point) in self._rank

    @property
    def listed(self) -> frozenset:
        return frozenset(p for t in self._tiers for p in t)

    @property
    def top(self) -> frozenset:
        return self.tiers[0] if self._tiers else frozenset()

    @property
    def is_strict(self) -> bool:
        if self.domain is None:
            return False
        return all(len(t) == 1 for t in self._tiers) and len(self._rank) == len(self.domain)

    @property
    def is_dichotomous(self) -> bool:
        return len(self._tiers) == 1

    def __eq__(self, other):
        return isinstance(other, PreferenceOrder) and self._rank == other._rank

    def __hash__(self):
        return hash(frozenset(self._rank.items()))

    def __repr__(self):
        body = " > ".join("~".join(sorted(map(_fmt_point, t))) for t in self._tiers)
        return f"PreferenceOrder({body})"


def _fmt_point(p) -> str:
    if isinstance(p, Fraction):
        return format_ratio(p)
    if isinstance(p, tuple):
        return "(" + ",".join(_fmt_point(x) for x in p) + ")"
    return str(p)


def compare_for_agent(pref: PreferenceOrder, a, b) -> Cmp:
    return pref.compare(a, b)


# ---------------------------------------------------------------------------
# games


class Game:
    """An immutable hedonic game of one of the supported variants.

    ``tiers`` holds one preference per agent, either as a ready
    :class:`PreferenceOrder` or as a list of tiers.  The preference domain is
    attached here: theta for two-class games, own-class fractions for k-HDGs,
    sizes ``1..n`` for anonymous games, and none (sparse) for k-tuple games.
    """

    __slots__ = (
        "variant", "class_of", "class_sizes", "preferences", "peaks",
        "theta", "_point_cache",
    )

    def __init__(
        self,
        variant: "Variant | str",
        class_of: Sequence[int],
        tiers: Sequence,
        *,
        num_classes: int | None = None,
        peaks: Sequence[float] | None = None,
    ):
        variant = Variant(variant)
        class_of = tuple(int(c) for c in class_of)
        n = len(class_of)
        if n == 0:
            raise GameError("a game needs at least one agent")
        if len(tiers) != n:
            raise GameError(f"{n} agents but {len(tiers)} preferences")
        if variant is Variant.ANONYMOUS:
            if any(c != 0 for c in class_of):
                raise GameError("anonymous games have a single class")
            num_classes = 1
        elif variant is Variant.HDG2:
            num_classes = 2
        elif num_classes is None:
            num_classes = max(class_of) + 1
        if any(c < 0 or c >= num_classes for c in class_of):
            raise GameError(f"class indices must lie in 0..{num_classes - 1}")
        sizes = [0] * num_classes
        for c in class_of:
            sizes[c] += 1

        self.variant = variant
        self.class_of = class_of
        self.class_sizes = tuple(sizes)
        self.theta = build_theta_set(sizes[0], n) if variant is Variant.HDG2 else None
        self._point_cache: dict = {}

        domains = [self._domain_for_class(c) for c in range(num_classes)]
        prefs = []
        for agent, t in enumerate(tiers):
            domain = domains[class_of[agent]]
            if isinstance(t, PreferenceOrder):
                pref = t if t.domain is domain else PreferenceOrder(t._tiers, domain)
            else:
                pref = PreferenceOrder(t, domain)
            if variant is Variant.KTUPLE:
                for point in pref.listed:
                    if not (isinstance(point, tuple) and len(point) == num_classes):
                        raise GameError(f"agent {agent}: {point!r} is not a {num_classes}-tuple")
            if pref.num_tiers > 1:
                alone = self.point(agent, self.singleton_counts(agent))
                if not pref.is_listed(alone):
                    raise GameError(f"agent {agent}: singleton point {_fmt_point(alone)} must be listed")
            prefs.append(pref)
        self.preferences = tuple(prefs)

        if peaks is not None:
            peaks = tuple(float(p) for p in peaks)
            if len(peaks) != n:
                raise GameError("one peak per agent required")
        self.peaks = peaks

    def _domain_for_class(self, c: int):
        n = len(self.class_of)
        if self.variant is Variant.HDG2:
            return self.theta
        if self.variant is Variant.KHDG:
            own = self.class_sizes[c]
            return ThetaSet(sorted({Fraction(l, r) for r in range(1, n + 1) for l in range(1, min(own, r) + 1)}))
        if self.variant is Variant.ANONYMOUS:
            return ThetaSet(range(1, n + 1))
        return None

    # basic shape ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.class_of)

    @property
    def num_classes(self) -> int:
        return len(self.class_sizes)

    @property
    def agents(self) -> range:
        return range(len(self.class_of))

    @property
    def red(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.class_of) if c == 0)

    @property
    def blue(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.class_of) if c == 1)

    @property
    def p(self) -> int:
        """Size of the smallest class (two-class games) or of N minus the largest class."""
        return self.n - max(self.class_sizes)

    # points and ranks ----------------------------------------------------

    def counts_of(self, members: Iterable[int]) -> tuple[int, ...]:
        counts = [0] * len(self.class_sizes)
        for i in members:
            counts[self.class_of[i]] += 1
        return tuple(counts)

    def singleton_counts(self, agent: int) -> tuple[int, ...]:
        counts = [0] * len(self.class_sizes)
        counts[self.class_of[agent]] = 1
        return tuple(counts)

    def point(self, agent: int, counts: tuple[int, ...]):
        """The value ``agent`` attaches to a coalition with class counts ``counts``."""
        cls = self.class_of[agent]
        key = (cls, counts)
        cached = self._point_cache.get(key)
        if cached is not None:
            return cached
        size = sum(counts)
        if size == 0:
            raise EmptyCoalitionError("empty coalition has no ratio")
        v = self.variant
        if v is Variant.HDG2:
            value = Fraction(counts[0], size)
        elif v is Variant.KHDG:
            value = Fraction(counts[cls], size)
        elif v is Variant.KTUPLE:
            value = tuple(Fraction(c, size) for c in counts)
        else:
            value = size
        self._point_cache[key] = value
        return value

    def rank(self, agent: int, counts: tuple[int, ...]) -> int:
        return self.preferences[agent].rank(self.point(agent, counts))

    def __eq__(self, other):
        return (
            isinstance(other, Game)
            and self.variant == other.variant
            and self.class_of == other.class_of
            and self.class_sizes == other.class_sizes
            and self.preferences == other.preferences
            and self.peaks == other.peaks
        )

    def __hash__(self):
        return hash((self.variant, self.class_of, self.preferences))

    def __repr__(self):
        return f"Game({self.variant.value}, classes={list(self.class_sizes)})"


def coalition_ratio(coalition: Iterable[int], game: Game) -> Fraction:
    """Fraction of red agents in ``coalition``."""
    members = list(coalition)
    if not members:
        raise EmptyCoalitionError("coalition must be non-empty")
    if game.variant is not Variant.HDG2:
        raise GameError("coalition_ratio is defined for two-class games")
    for i in members:
        if not 0 <= i < game.n:
            raise UnknownAgentError(f"unknown agent {i}")
    red = sum(1 for i in members if game.class_of[i] == 0)
    return Fraction(red, len(members))


# ---------------------------------------------------------------------------
# outcomes


def _check_partition(coalitions: Sequence[Iterable[int]], n: int) -> list[frozenset]:
    blocks = [frozenset(c) for c in coalitions]
    seen: set = set()
    for block in blocks:
        if not block:
            raise OutcomeError("coalitions must be non-empty")
        for i in block:
            if not isinstance(i, int) or not 0 <= i < n:
                raise UnknownAgentError(f"unknown agent {i!r}")
        overlap = seen & block
        if overlap:
            raise OverlappingCoalitionsError(f"agents {sorted(overlap)} appear in two coalitions")
        seen |= block
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise UncoveredAgentError(f"agents {missing} are in no coalition")
    return blocks


class Outcome:
    """A partition of ``0..n-1``.

    Coalitions are stored in canonical order (by smallest member), and a
    coalition's id is its position in that order.
    """

    __slots__ = ("coalitions", "coalition_of", "_counts_for")

    def __init__(self, coalitions: Iterable[Iterable[int]], n: int | None = None):
        coalitions = [list(c) for c in coalitions]
        if n is None:
            n = sum(len(c) for c in coalitions)
        blocks = _check_partition(coalitions, n)
        blocks.sort(key=min)
        self.coalitions: tuple[frozenset, ...] = tuple(blocks)
        owner = [0] * n
        for cid, block in enumerate(blocks):
            for i in block:
                owner[i] = cid
        self.coalition_of: tuple[int, ...] = tuple(owner)
        self._counts_for = None

    @classmethod
    def singletons(cls, n: int) -> "Outcome":
        return cls([[i] for i in range(n)], n)

    @classmethod
    def grand(cls, n: int) -> "Outcome":
        return cls([list(range(n))], n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Outcome":
        groups: dict[int, list[int]] = {}
        for agent, label in enumerate(labels):
            groups.setdefault(label, []).append(agent)
        return cls(groups.values(), len(labels))

    @property
    def n(self) -> int:
        return len(self.coalition_of)

    def coalition(self, agent: int) -> frozenset:
        return self.coalitions[self.coalition_of[agent]]

    def class_counts(self, game: Game) -> tuple[tuple[int, ...], ...]:
        """Per-coalition class counts, cached for the most recent game."""
        cached = self._counts_for
        if cached is not None and cached[0] is game:
            return cached[1]
        counts = tuple(game.counts_of(c) for c in self.coalitions)
        self._counts_for = (game, counts)
        return counts

    def as_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.coalitions]

    def __eq__(self, other):
        return isinstance(other, Outcome) and self.coalitions == other.coalitions

    def __hash__(self):
        return hash(self.coalitions)

    def __repr__(self):
        return "Outcome(" + ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.as_lists()) + ")"


def validate_outcome(game: Game, outcome: "Outcome | Sequence[Iterable[int]]") -> None:
    """Raise an :class:`OutcomeError` unless ``outcome`` partitions the game's agents."""
    coalitions = outcome.coalitions if isinstance(outcome, Outcome) else outcome
    _check_partition(list(coalitions), game.n)


# ---------------------------------------------------------------------------
# deviations


@dataclass(frozen=True)
class Deviation:
    agent: int
    target: int | None  # coalition id, or EMPTY
    concept: Concept

    def to_dict(self) -> dict:
        return {"agent": self.agent, "target": self.target, "concept": self.concept.value}


def _plus(counts: tuple[int, ...], cls: int) -> tuple[int, ...]:
    out = list(counts)
    out[cls] += 1
    return tuple(out)


class _Scan:
    """Per-outcome scratch state for deviation searches."""

    def __init__(self, game: Game, outcome: Outcome):
        self.game = game
        self.outcome = outcome
        self.counts = outcome.class_counts(game)
        self._accepts: dict = {}

    def current_rank(self, agent: int) -> int:
        return self.game.rank(agent, self.counts[self.outcome.coalition_of[agent]])

    def accepts(self, cid: int, cls: int) -> bool:
        """Do all members of coalition ``cid`` weakly welcome a newcomer of class ``cls``?"""
        key = (cid, cls)
        hit = self._accepts.get(key)
        if hit is not None:
            return hit
        game = self.game
        before = self.counts[cid]
        after = _plus(before, cls)
        ok = all(game.rank(j, after) <= game.rank(j, before) for j in self.outcome.coalitions[cid])
        self._accepts[key] = ok
        return ok

    def deviations(self, agent: int, concept: Concept):
        game, outcome = self.game, self.outcome
        own = outcome.coalition_of[agent]
        cls = game.class_of[agent]
        cur = self.current_rank(agent)
        for cid, before in enumerate(self.counts):
            if cid == own:
                continue
            if game.rank(agent, _plus(before, cls)) < cur:
                if concept is Concept.NS or self.accepts(cid, cls):
                    yield Deviation(agent, cid, concept)
        if len(outcome.coalitions[own]) > 1 and game.rank(agent, game.singleton_counts(agent)) < cur:
            yield Deviation(agent, EMPTY, concept)


def find_deviation(game: Game, outcome: Outcome, agent: int, concept: "Concept | str") -> Deviation | None:
    """First deviation of ``agent``: coalitions by ascending id, then EMPTY."""
    concept = Concept.parse(concept)
    return next(_Scan(game, outcome).deviations(agent, concept), None)


def all_deviations(game: Game, outcome: Outcome, concept: "Concept | str") -> list[Deviation]:
    """Every available deviation, ordered by agent, then target id, EMPTY last."""
    concept = Concept.parse(concept)
    scan = _Scan(game, outcome)
    out: list[Deviation] = []
    for agent in game.agents:
        out.extend(scan.deviations(agent, concept))
    return out


def is_valid_deviation(game: Game, outcome: Outcome, dev: Deviation) -> bool:
    scan = _Scan(game, outcome)
    return dev in scan.deviations(dev.agent, dev.concept)


def apply_deviation(outcome: Outcome, dev: Deviation) -> Outcome:
    """The outcome after ``dev.agent`` moves to ``dev.target`` (or a new singleton)."""
    blocks = [set(c) for c in outcome.coalitions]
    blocks[outcome.coalition_of[dev.agent]].discard(dev.agent)
    if dev.target is EMPTY:
        blocks.append({dev.agent})
    else:
        blocks[dev.target].add(dev.agent)
    return Outcome([b for b in blocks if b], outcome.n)


def pareto_dominates(game: Game, a: Outcome, b: Outcome) -> bool:
    """True iff every agent weakly prefers ``a`` to ``b`` and someone strictly does."""
    ca, cb = a.class_counts(game), b.class_counts(game)
    strict = False
    for i in game.agents:
        ra = game.rank(i, ca[a.coalition_of[i]])
        rb = game.rank(i, cb[b.coalition_of[i]])
        if ra > rb:
            return False
        if ra < rb:
            strict = True
    return strict

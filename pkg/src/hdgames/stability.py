"""Stability checks and constructive solvers.

* :func:`check_stability` -- NS / IS verification with a witness deviation.
* :func:`find_is_alg1` -- polynomial-time IS outcome for any two-class game.
* :func:`decide_ns_xp` / :func:`decide_ns_xp_ktuple` -- exact NS existence,
  exponential only in the number of agents outside the largest class.
* :func:`decide_ns_dichotomous_anonymous` -- NS existence for anonymous games
  where each agent approves exactly one coalition size.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Hashable, Iterator, Sequence

from .core import (
    Concept,
    Deviation,
    Game,
    GameError,
    Outcome,
    Variant,
    _Scan,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    witness: Deviation | None
    concept: Concept

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "concept": self.concept.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def check_stability(game: Game, outcome: Outcome, concept: "Concept | str") -> StabilityReport:
    """Scan agents in ascending order and report the first deviation found."""
    concept = Concept.parse(concept)
    scan = _Scan(game, outcome)
    for agent in game.agents:
        dev = next(scan.deviations(agent, concept), None)
        if dev is not None:
            return StabilityReport(False, dev, concept)
    return StabilityReport(True, None, concept)


def is_stable(game: Game, outcome: Outcome, concept: "Concept | str") -> bool:
    return check_stability(game, outcome, concept).stable


# ---------------------------------------------------------------------------
# Algorithm 1


@dataclass
class Alg1Result:
    outcome: Outcome
    initial: frozenset          # the balanced seed coalition
    joins: list[tuple[int, Fraction]] = field(default_factory=list)  # (agent, ratio after joining)

    @property
    def final(self) -> frozenset:
        return self.initial.union(a for a, _ in self.joins)


def _require_hdg2(game: Game) -> None:
    if game.variant is not Variant.HDG2:
        raise GameError(f"expected a two-class game, got {game.variant.value}")


def run_alg1(game: Game) -> Alg1Result:
    """Algorithm 1 with its join trace.

    Seed: the first ``min(|B*|, |R*|)`` agents (by id) of B* = blue agents
    weakly preferring 1/2 to 0 and R* = red agents weakly preferring 1/2 to 1.
    Then agents outside the big coalition are scanned by ascending id, and any
    agent with an IS-deviation into it joins at once; passes repeat until one
    adds nobody.
    """
    _require_hdg2(game)
    half = Fraction(1, 2)
    blue_star: list[int] = []
    red_star: list[int] = []
    if half in game.theta:
        for i in game.agents:
            pref = game.preferences[i]
            if game.class_of[i] == 1 and pref.weakly_prefers(half, Fraction(0)):
                blue_star.append(i)
            elif game.class_of[i] == 0 and pref.weakly_prefers(half, Fraction(1)):
                red_star.append(i)
    size = min(len(blue_star), len(red_star))
    seed = frozenset(blue_star[:size] + red_star[:size])

    members = set(seed)
    counts = game.counts_of(members)
    joins: list[tuple[int, Fraction]] = []
    changed = bool(members)
    while changed:
        changed = False
        for i in game.agents:
            if i in members:
                continue
            cls = game.class_of[i]
            after = list(counts)
            after[cls] += 1
            after = tuple(after)
            if game.rank(i, after) >= game.rank(i, game.singleton_counts(i)):
                continue
            if all(game.rank(j, after) <= game.rank(j, counts) for j in members):
                members.add(i)
                counts = after
                joins.append((i, Fraction(after[0], sum(after))))
                changed = True

    blocks = [sorted(members)] if members else []
    blocks += [[i] for i in game.agents if i not in members]
    return Alg1Result(Outcome(blocks, game.n), seed, joins)


def find_is_alg1(game: Game) -> Outcome:
    """An individually stable outcome of a two-class game, via Algorithm 1."""
    return run_alg1(game).outcome


# ---------------------------------------------------------------------------
# knapsack


def knapsack_compose(safe_sizes: Sequence[int], total: int) -> list[int] | None:
    """Write ``total`` as a sum of elements of ``safe_sizes`` (repetition allowed).

    Returns the parts in non-decreasing order, or None.  O(total * |sizes|).
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    sizes = sorted(set(safe_sizes))
    if any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    # last[v] = a part used to reach v (largest such part), -1 if unreachable
    last = [-1] * (total + 1)
    last[0] = 0
    for v in range(1, total + 1):
        for s in reversed(sizes):
            if s <= v and last[v - s] != -1:
                last[v] = s
                break
    if last[total] == -1:
        return None
    parts = []
    v = total
    while v:
        parts.append(last[v])
        v -= last[v]
    return sorted(parts)


# ---------------------------------------------------------------------------
# max flow


class MalformedNetworkError(GameError):
    pass


class FlowNetwork:
    """Directed network with integer capacities and hashable node labels."""

    def __init__(self, source: Hashable = "source", sink: Hashable = "sink"):
        if source == sink:
            raise MalformedNetworkError("source and sink must differ")
        self.source = source
        self.sink = sink
        self.nodes: dict[Hashable, int] = {}
        self.edges: list[tuple[Hashable, Hashable, int]] = []
        self.add_node(source)
        self.add_node(sink)

    def add_node(self, label: Hashable) -> None:
        self.nodes.setdefault(label, len(self.nodes))

    def add_edge(self, u: Hashable, v: Hashable, capacity: int) -> None:
        if int(capacity) != capacity or capacity < 0:
            raise MalformedNetworkError(f"capacity {capacity!r} on {u!r}->{v!r} is not a non-negative integer")
        for label in (u, v):
            if label not in self.nodes:
                raise MalformedNetworkError(f"unknown node {label!r}")
        self.edges.append((u, v, int(capacity)))


@dataclass
class FlowResult:
    value: int
    flow: dict  # (u, v) -> units sent along the edge(s) u->v

    def assignment(self) -> dict:
        """Map each ``("x", i)`` node to the ``("y", j)`` node receiving its unit."""
        out = {}
        for (u, v), f in self.flow.items():
            if f > 0 and isinstance(u, tuple) and u[0] == "x" and isinstance(v, tuple) and v[0] == "y":
                out[u] = v
        return out


def max_flow(network: FlowNetwork) -> FlowResult:
    """Edmonds-Karp (shortest augmenting paths); integral on integral input."""
    idx = network.nodes
    size = len(idx)
    # residual graph as edge arrays: to, cap, rev
    head: list[list[int]] = [[] for _ in range(size)]
    to: list[int] = []
    cap: list[int] = []
    for u, v, c in network.edges:
        a, b = idx[u], idx[v]
        head[a].append(len(to)); to.append(b); cap.append(c)
        head[b].append(len(to)); to.append(a); cap.append(0)
    s, t = idx[network.source], idx[network.sink]
    value = 0
    while True:
        parent_edge = [-1] * size
        parent_edge[s] = -2
        queue = deque([s])
        while queue and parent_edge[t] == -1:
            u = queue.popleft()
            for e in head[u]:
                if cap[e] > 0 and parent_edge[to[e]] == -1:
                    parent_edge[to[e]] = e
                    queue.append(to[e])
        if parent_edge[t] == -1:
            break
        push = None
        v = t
        while v != s:
            e = parent_edge[v]
            push = cap[e] if push is None else min(push, cap[e])
            v = to[e ^ 1]
        v = t
        while v != s:
            e = parent_edge[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = to[e ^ 1]
        value += push
    flow: dict = {}
    for k, (u, v, c) in enumerate(network.edges):
        sent = c - cap[2 * k]
        flow[(u, v)] = flow.get((u, v), 0) + sent
    return FlowResult(value, flow)


# ---------------------------------------------------------------------------
# XP decider for Nash stability


@dataclass(frozen=True)
class GuessState:
    """Blocks of the guessed agents plus the number of free agents joining each."""

    blocks: tuple[tuple[int, ...], ...]
    free: tuple[int, ...]   # n_j - |C_j| for each block
    n0: int                  # free agents left for all-free coalitions

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) + f for b, f in zip(self.blocks, self.free))


def _free_class(game: Game) -> int:
    sizes = game.class_sizes
    return max(range(len(sizes)), key=lambda c: (sizes[c], -c))


def _bounded_vectors(k: int, budget: int) -> Iterator[tuple[int, ...]]:
    """Non-negative integer k-vectors with sum <= budget, lexicographic."""
    if k == 0:
        yield ()
        return
    for first in range(budget + 1):
        for rest in _bounded_vectors(k - 1, budget - first):
            yield (first,) + rest


def enumerate_guesses(game: Game) -> Iterator[GuessState]:
    from .oracle import restricted_growth_strings

    free_cls = _free_class(game)
    guessed = [i for i in game.agents if game.class_of[i] != free_cls]
    n_free = game.class_sizes[free_cls]
    if guessed:
        partitions = (
            [tuple(guessed[i] for i, lab in enumerate(rgs) if lab == b) for b in range(max(rgs) + 1)]
            for rgs in restricted_growth_strings(len(guessed))
        )
    else:
        partitions = iter([[]])
    for blocks in partitions:
        for free in _bounded_vectors(len(blocks), n_free):
            yield GuessState(tuple(blocks), free, n_free - sum(free))


def _plus(counts, cls, times=1):
    out = list(counts)
    out[cls] += times
    return tuple(out)


def _try_guess(game: Game, guess: GuessState, free_cls: int) -> Outcome | None:
    k = len(guess.blocks)
    counts = [_plus(game.counts_of(b), free_cls, f) for b, f in zip(guess.blocks, guess.free)]
    alone_free = game.singleton_counts(next(i for i in game.agents if game.class_of[i] == free_cls)) \
        if game.class_sizes[free_cls] else None

    # guessed agents: no deviation to another A_s or to being alone
    home_rank: dict[int, int] = {}
    for j, block in enumerate(guess.blocks):
        for i in block:
            cur = game.rank(i, counts[j])
            cls = game.class_of[i]
            if game.rank(i, game.singleton_counts(i)) < cur:
                return None
            for s in range(k):
                if s != j and game.rank(i, _plus(counts[s], cls)) < cur:
                    return None
            home_rank[i] = cur

    # stage two: route every free agent to a block or to the all-free pool
    free_agents = [i for i in game.agents if game.class_of[i] == free_cls]
    n_free = len(free_agents)
    net = FlowNetwork()
    for j in range(k + 1):
        net.add_node(("y", j))
    net.add_edge(("y", 0), net.sink, guess.n0)
    for j in range(k):
        net.add_edge(("y", j + 1), net.sink, guess.free[j])
    for i in free_agents:
        x = ("x", i)
        net.add_node(x)
        net.add_edge(net.source, x, 1)
        # joining a block that already holds every free agent cannot happen; rank it out of reach
        joined = [
            game.rank(i, _plus(counts[s], free_cls)) if guess.free[s] < n_free else float("inf")
            for s in range(k)
        ]
        r_alone = game.rank(i, alone_free)
        for j in range(k):
            if guess.free[j] == 0:
                continue
            here = game.rank(i, counts[j])
            if here <= r_alone and all(here <= joined[s] for s in range(k) if s != j):
                net.add_edge(x, ("y", j + 1), 1)
        if guess.n0 and all(r_alone <= r for r in joined):
            net.add_edge(x, ("y", 0), 1)
    result = max_flow(net)
    if result.value != len(free_agents):
        return None

    # stage three: split the all-free pool into sizes no guessed agent wants to join
    safe = []
    for t in range(1, guess.n0 + 1):
        if all(
            home_rank[i] <= game.rank(i, _plus(game.singleton_counts(i), free_cls, t))
            for i in home_rank
        ):
            safe.append(t)
    parts = knapsack_compose(safe, guess.n0)
    if parts is None:
        return None

    groups: list[list[int]] = [list(b) for b in guess.blocks]
    pool: list[int] = []
    for (x, y) in sorted(result.assignment().items()):
        if y[1] == 0:
            pool.append(x[1])
        else:
            groups[y[1] - 1].append(x[1])
    pool.sort()
    start = 0
    for size in parts:
        groups.append(pool[start:start + size])
        start += size
    return Outcome(groups, game.n)


def _decide_ns_guessing(game: Game) -> Outcome | None:
    free_cls = _free_class(game)
    for guess in enumerate_guesses(game):
        outcome = _try_guess(game, guess, free_cls)
        if outcome is None:
            continue
        report = check_stability(game, outcome, Concept.NS)
        if report.stable:
            return outcome
        log.warning("guess %s produced an unstable outcome (witness %s); skipping", guess, report.witness)
    return None


def decide_ns_xp(game: Game) -> Outcome | None:
    """A Nash stable outcome of a two-class game, or None if none exists.

    Guesses the partition of the smaller class and the size of each of its
    coalitions, checks by max-flow that the larger class can fill the
    coalitions without anyone wanting to move, then splits the leftover
    homogeneous pool with a knapsack over "safe" sizes.
    """
    _require_hdg2(game)
    return _decide_ns_guessing(game)


def decide_ns_xp_ktuple(game: Game) -> Outcome | None:
    """As :func:`decide_ns_xp`, guessing over everyone outside the largest class."""
    if game.variant not in (Variant.KTUPLE, Variant.KHDG, Variant.HDG2):
        raise GameError(f"guessing decider does not support {game.variant.value} games")
    return _decide_ns_guessing(game)


# ---------------------------------------------------------------------------
# dichotomous anonymous games with one approved size


class MalformedDichotomyError(GameError):
    pass


def approved_sizes(game: Game) -> list[int]:
    """The single approved size of each agent (0 when it approves none)."""
    if game.variant is not Variant.ANONYMOUS:
        raise GameError("approved sizes are defined for anonymous games")
    out = []
    for i, pref in enumerate(game.preferences):
        if not pref.tiers:
            out.append(0)
        elif len(pref.tiers) == 1 and len(pref.tiers[0]) == 1:
            out.append(next(iter(pref.tiers[0])))
        else:
            raise MalformedDichotomyError(f"agent {i} does not approve exactly one size")
    return out


def decide_ns_dichotomous_anonymous(game: Game, approved_size: Sequence[int] | None = None) -> Outcome | None:
    """NS outcome of an anonymous game where agent i approves only size ``s_i``."""
    derived = approved_sizes(game)
    if approved_size is None:
        sizes = derived
    else:
        sizes = [int(s) for s in approved_size]
        if len(sizes) != game.n:
            raise GameError("one approved size per agent required")
        for i, (s, d) in enumerate(zip(sizes, derived)):
            if s != d and not (d == 0 and not 1 <= s <= game.n):
                raise MalformedDichotomyError(f"agent {i}: approved size {s} disagrees with its preference")
    n = game.n
    if 1 not in sizes:
        return Outcome.grand(n)
    outcome = _anon_deficit_construction(sizes, n)
    if outcome is None:
        # the deficit count is only sufficient: an agent of a higher size may sit unhappily
        # in the unique coalition one smaller than its approved size
        outcome = _anon_profile_search(sizes, n)
    if outcome is not None:
        report = check_stability(game, outcome, Concept.NS)
        if not report.stable:
            raise AssertionError(f"constructed outcome is not Nash stable: {report.witness}")
    return outcome


def _anon_deficit_construction(sizes: list[int], n: int) -> Outcome | None:
    by_size: dict[int, list[int]] = {}
    for i, s in enumerate(sizes):
        by_size.setdefault(s, []).append(i)
    ell = 0
    while by_size.get(ell + 1):
        ell += 1
    deficit = {j: j * ceil(len(by_size[j]) / j) - len(by_size[j]) for j in range(1, ell + 1)}
    spare = sorted(i for i, s in enumerate(sizes) if not 1 <= s <= ell)
    if sum(deficit.values()) > len(spare):
        return None
    blocks: list[list[int]] = []
    cursor = 0
    for j in range(1, ell + 1):
        members = by_size[j] + spare[cursor:cursor + deficit[j]]
        cursor += deficit[j]
        blocks += [members[a:a + j] for a in range(0, len(members), j)]
    blocks += [[i] for i in spare[cursor:]]
    return Outcome(blocks, n)


def _integer_partitions(n: int, largest: int | None = None) -> Iterator[list[int]]:
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - k, k):
            yield [k] + rest


def _anon_profile_search(sizes: list[int], n: int) -> Outcome | None:
    """Exhaustive over coalition-size profiles; each profile is a transportation problem.

    An agent approving size j >= 2 may sit in a coalition of the wrong size c only if no
    other coalition has size j - 1; an agent approving size 1 must be alone.
    """
    types: dict[int, list[int]] = {}
    for i, s in enumerate(sizes):
        types.setdefault(s if 1 <= s <= n else 0, []).append(i)
    for parts in _integer_partitions(n):
        mult: dict[int, int] = {}
        for k in parts:
            mult[k] = mult.get(k, 0) + 1
        if types.get(1) and 1 not in mult:
            continue
        net = FlowNetwork()
        for k in mult:
            net.add_node(("y", k))
            net.add_edge(("y", k), net.sink, k * mult[k])
        for j, members in types.items():
            net.add_node(("t", j))
            net.add_edge(net.source, ("t", j), len(members))
            for k in mult:
                if j == 0 or k == j:
                    ok = True
                elif j == 1:
                    ok = False
                else:
                    others = mult.get(j - 1, 0) - (1 if k == j - 1 else 0)
                    ok = others == 0
                if ok:
                    net.add_edge(("t", j), ("y", k), len(members))
        res = max_flow(net)
        if res.value < n:
            continue
        pools: dict[int, list[int]] = {k: [] for k in mult}
        for j, members in types.items():
            queue = iter(members)
            for k in sorted(mult):
                for _ in range(res.flow.get((("t", j), ("y", k)), 0)):
                    pools[k].append(next(queue))
        blocks = [pools[k][a:a + k] for k in sorted(mult) for a in range(0, len(pools[k]), k)]
        return Outcome(blocks, n)
    return None

"""Better-response dynamics for individual stability (IS-BRD)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import (
    EMPTY,
    Concept,
    Deviation,
    Game,
    Outcome,
    Variant,
    all_deviations,
    apply_deviation,
    is_valid_deviation,
)
from .rng import make_rng
from .stability import check_stability


def default_cap(n: int) -> int:
    return 10 * n * n


@dataclass
class BRDTrace:
    initial: Outcome
    steps: list[Deviation] = field(default_factory=list)
    final: Outcome | None = None
    converged: bool = False
    iteration_cap: int = 0

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "initial": self.initial.as_lists(),
            "steps": [[d.agent, d.target] for d in self.steps],
            "final": self.final.as_lists(),
            "converged": self.converged,
            "iteration_cap": self.iteration_cap,
            "iterations": self.iterations,
        }


def replay(trace: BRDTrace, game: Game | None = None) -> Outcome:
    """Re-apply the recorded steps; with ``game``, also check each is an IS-deviation."""
    outcome = trace.initial
    for step in trace.steps:
        if game is not None and not is_valid_deviation(game, outcome, step):
            raise ValueError(f"{step} is not an IS-deviation from {outcome}")
        outcome = apply_deviation(outcome, step)
    return outcome


class _HDGScanner:
    """Vectorised enumeration of all deviations in a two-class game.

    ``table[i, r, s]`` is agent i's rank of a coalition with r red members and
    size s.  Deviations come out in the same order as
    :func:`hdgames.core.all_deviations`: by agent, then target id, EMPTY last.
    """

    def __init__(self, game: Game):
        n = game.n
        reds = game.class_sizes[0]
        theta = game.theta
        worst = max(p.num_tiers for p in game.preferences) + 1
        ratio_idx = np.zeros((reds + 2, n + 2), dtype=np.int64)
        valid = np.zeros((reds + 2, n + 2), dtype=bool)
        for s in range(1, n + 1):
            for r in range(0, min(reds, s) + 1):
                ratio_idx[r, s] = theta.index(Fraction(r, s))
                valid[r, s] = True
        by_theta = np.array([p.ranks_over(theta) for p in game.preferences], dtype=np.int64)
        table = by_theta[:, ratio_idx]
        table[:, ~valid] = worst
        self.table = table
        self.red = np.array([1 if c == 0 else 0 for c in game.class_of], dtype=np.int64)
        self.agents = np.arange(n)

    def deviations(self, labels: np.ndarray, reds: np.ndarray, sizes: np.ndarray, concept: Concept):
        table, red, agents = self.table, self.red, self.agents
        k = len(sizes)
        own_r, own_s = reds[labels], sizes[labels]
        cur = table[agents, own_r, own_s]
        join = table[agents[:, None], reds[None, :] + red[:, None], sizes[None, :] + 1]
        better = join < cur[:, None]
        better[agents, labels] = False
        if concept is Concept.IS:
            # does member j still weakly like its coalition after a newcomer of colour c joins?
            accepts = np.empty((2, k), dtype=bool)
            for colour in (0, 1):
                after = table[agents, own_r + colour, own_s + 1]
                veto = np.bincount(labels, weights=(after > cur), minlength=k)
                accepts[colour] = veto == 0
            better &= accepts[red]
        alone = (table[agents, red, 1] < cur) & (own_s > 1)
        full = np.concatenate([better, alone[:, None]], axis=1)
        rows, cols = np.nonzero(full)
        targets = [EMPTY if c == k else int(c) for c in cols]
        return rows.tolist(), targets


def _state(outcome: Outcome, game: Game):
    labels = np.array(outcome.coalition_of, dtype=np.int64)
    counts = outcome.class_counts(game)
    reds = np.array([c[0] for c in counts], dtype=np.int64)
    sizes = np.array([sum(c) for c in counts], dtype=np.int64)
    return labels, reds, sizes


def run_is_brd(
    game: Game,
    initial: Outcome,
    seed: "int | random.Random | None" = 0,
    cap: int | None = None,
    *,
    fast: bool = True,
) -> BRDTrace:
    """IS-BRD: while some IS-deviation exists, perform one chosen uniformly at random.

    Stops at an IS outcome (``converged``) or after ``cap`` deviations
    (default ``10 n^2``).  The deviation set is rebuilt from scratch each step.
    ``fast`` uses the numpy scanner for two-class games; results are identical
    to the reference path.
    """
    if cap is None:
        cap = default_cap(game.n)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if initial.n != game.n:
        raise ValueError("initial outcome does not match the game")
    rng = make_rng(seed)
    scanner = _HDGScanner(game) if fast and game.variant is Variant.HDG2 else None
    trace = BRDTrace(initial=initial, iteration_cap=cap)
    outcome = initial
    while True:
        if scanner is not None:
            agents, targets = scanner.deviations(*_state(outcome, game), Concept.IS)
            options = [Deviation(a, t, Concept.IS) for a, t in zip(agents, targets)]
        else:
            options = all_deviations(game, outcome, Concept.IS)
        if not options:
            trace.converged = True
            break
        if len(trace.steps) >= cap:
            break
        step = options[rng.randrange(len(options))]
        trace.steps.append(step)
        outcome = apply_deviation(outcome, step)
    trace.final = outcome
    return trace


# ---------------------------------------------------------------------------
# uniform random set partitions


@lru_cache(maxsize=None)
def _completions(remaining: int, blocks: int) -> int:
    """Ways to place ``remaining`` further elements given ``blocks`` open blocks."""
    if remaining == 0:
        return 1
    return blocks * _completions(remaining - 1, blocks) + _completions(remaining - 1, blocks + 1)


def sample_uniform_partition(n: int, seed: "int | random.Random | None" = 0) -> Outcome:
    """A set partition of ``0..n-1`` drawn exactly uniformly from all Bell(n).

    Agents are placed in order; agent a joins each open block with weight
    equal to the number of completions from there, and opens a new block
    with the matching weight.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    labels = [0]
    blocks = 1
    for a in range(1, n):
        remaining = n - a - 1
        stay = _completions(remaining, blocks)
        fresh = _completions(remaining, blocks + 1)
        u = rng.randrange(blocks * stay + fresh)
        if u < blocks * stay:
            labels.append(u // stay)
        else:
            labels.append(blocks)
            blocks += 1
    return Outcome.from_labels(labels)


def initial_outcome(kind: str, n: int, rng: "int | random.Random | None" = 0) -> Outcome:
    if kind == "grand":
        return Outcome.grand(n)
    if kind == "singletons":
        return Outcome.singletons(n)
    if kind == "uniform":
        return sample_uniform_partition(n, rng)
    raise ValueError(f"unknown initial partition {kind!r}")


def verified(game: Game, trace: BRDTrace) -> bool:
    return trace.converged and check_stability(game, trace.final, Concept.IS).stable

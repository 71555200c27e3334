"""Empirical comparison of Algorithm 1 and IS-BRD on sampled single-peaked games.

Two grids are supported:

``balanced``  s red and s blue agents for each s in ``sizes``
``ratio``     fixed n, red count swept so that |R|/n runs from 0 to 1/2

Each instance gets its own seed derived from ``(master_seed, grid, model,
cell, instance)``, so rows do not depend on execution order or ``jobs``.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Concept, Outcome
from .dynamics import default_cap, run_is_brd, sample_uniform_partition
from .measures import measure
from .rng import derive_seed, make_rng
from .samplers import Model, sample_dichotomous_game, sample_game
from .stability import check_stability, find_is_alg1

log = logging.getLogger(__name__)

SCHEMA_VERSION = "hdg-experiment/1"
ALGORITHMS = ("alg1", "is-brd")
# "bei19" is reserved in the algo column for externally produced rows
RESERVED_ALGORITHMS = ALGORITHMS + ("bei19",)

MEASURE_COLUMNS = [
    "game_id", "algo", "n", "theta_N", "model", "welfare_mode",
    "welfare", "avg_size", "avg_diversity", "seed",
]
EXPERIMENT_COLUMNS = MEASURE_COLUMNS + ["grid", "red", "blue", "brd_iterations", "converged", "is_verified", "schema"]
CONVERGENCE_COLUMNS = [
    "kind", "model", "n", "red", "blue", "run", "seed", "init",
    "iterations", "iterations_per_n2", "cap", "converged", "max_moves_per_agent",
]


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Decimal rendering with 15 significant digits."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (Fraction, float)):
        return f"{float(x):.15g}"
    return str(x)


@dataclass
class ExperimentConfig:
    models: Sequence[str] = ("uSP", "upSP", "symSP")
    grid: str = "balanced"
    sizes: Sequence[int] = tuple(range(2, 26))      # balanced: s values
    n: int = 50                                     # ratio grid: total agents
    reds: Sequence[int] = (0, 5, 10, 15, 20, 25)    # ratio grid: red counts
    instances_per_cell: int = 100
    algorithms: Sequence[str] = ALGORITHMS
    master_seed: int = 0
    jobs: int = 1

    @classmethod
    def full_scale(cls, grid: str = "balanced", **kw) -> "ExperimentConfig":
        defaults = dict(sizes=tuple(range(2, 51)), reds=tuple(range(0, 26)), instances_per_cell=1000)
        defaults.update(kw)
        return cls(grid=grid, **defaults)

    def validate(self) -> None:
        if self.instances_per_cell < 1:
            raise ConfigError("instances_per_cell must be at least 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")
        for m in self.models:
            Model.parse(m)
        if self.grid not in ("balanced", "ratio"):
            raise ConfigError(f"unknown grid {self.grid!r}")
        for red, blue in self.cells():
            if red < 0 or blue < 1 or red + blue < 2:
                raise ConfigError(f"invalid cell red={red}, blue={blue}")

    def cells(self) -> list[tuple[int, int]]:
        if self.grid == "balanced":
            return [(s, s) for s in self.sizes]
        return [(r, self.n - r) for r in self.reds]


@dataclass
class _Task:
    grid: str
    model: str
    model_idx: int
    cell_idx: int
    red: int
    blue: int
    instance: int
    master_seed: int
    algorithms: tuple[str, ...]


def _grid_code(grid: str) -> int:
    return 0 if grid == "balanced" else 1


def _run_task(task: _Task) -> list[dict]:
    seed = derive_seed(task.master_seed, _grid_code(task.grid), task.model_idx, task.cell_idx, task.instance)
    rng = make_rng(seed)
    model = Model.parse(task.model)
    game = sample_game(model, task.red, task.blue, rng)
    n = game.n
    game_id = f"{task.grid}-{model.value}-r{task.red}b{task.blue}-{task.instance}"
    rows = []
    for algo in task.algorithms:
        iterations, converged = "", True
        if algo == "alg1":
            outcome = find_is_alg1(game)
        else:
            start = sample_uniform_partition(n, rng)
            trace = run_is_brd(game, start, rng, default_cap(n))
            outcome, iterations, converged = trace.final, trace.iterations, trace.converged
        stable = check_stability(game, outcome, Concept.IS).stable
        if algo == "alg1" and not stable:
            raise AssertionError(f"{game_id}: Algorithm 1 returned a non-IS outcome")
        if not converged:
            log.warning("%s: IS-BRD hit the iteration cap", game_id)
        rep = measure(game, outcome)
        rows.append({
            "game_id": game_id,
            "algo": algo,
            "n": n,
            "theta_N": fmt(Fraction(task.red, n)),
            "model": model.value,
            "welfare_mode": rep.welfare_mode,
            "welfare": fmt(rep.welfare),
            "avg_size": fmt(rep.avg_size),
            "avg_diversity": fmt(rep.avg_diversity),
            "seed": seed,
            "grid": task.grid,
            "red": task.red,
            "blue": task.blue,
            "brd_iterations": iterations,
            "converged": fmt(converged),
            "is_verified": fmt(stable),
            "schema": SCHEMA_VERSION,
        })
    return rows


def _tasks(config: ExperimentConfig) -> list[_Task]:
    out = []
    for mi, model in enumerate(config.models):
        canonical = Model.parse(model).value
        for ci, (red, blue) in enumerate(config.cells()):
            for inst in range(config.instances_per_cell):
                out.append(_Task(config.grid, canonical, mi, ci, red, blue, inst,
                                 config.master_seed, tuple(config.algorithms)))
    return out


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """One row per (model, cell, instance, algorithm), in that order."""
    config.validate()
    tasks = _tasks(config)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=16))
    else:
        chunks = [_run_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows: Iterable[dict], columns: Sequence[str], stream=None) -> str:
    buf = stream if stream is not None else io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue() if stream is None else ""


# ---------------------------------------------------------------------------
# convergence of IS-BRD


def run_convergence_study(
    max_n: int,
    instances: int,
    seed: int = 0,
    *,
    model: str = "uSP",
    kind: str = "uniform",
    sizes: Sequence[int] | None = None,
) -> list[dict]:
    """Iteration counts of IS-BRD on balanced games with n = 4, 6, ..., max_n.

    ``kind="uniform"`` samples single-peaked games and starts from a uniform
    random partition; ``kind="dichotomous"`` samples dichotomous games and
    starts from the grand coalition.
    """
    if max_n > 100:
        raise ConfigError("max_n is capped at 100")
    if kind not in ("uniform", "dichotomous"):
        raise ConfigError(f"unknown kind {kind!r}")
    ns = list(sizes) if sizes is not None else list(range(4, max_n + 1, 2))
    rows = []
    for ni, n in enumerate(ns):
        red, blue = n // 2, n - n // 2
        for run in range(instances):
            run_seed = derive_seed(seed, ni, run)
            rng = make_rng(run_seed)
            if kind == "uniform":
                game = sample_game(model, red, blue, rng)
                start = sample_uniform_partition(n, rng)
                init = "uniform"
            else:
                game = sample_dichotomous_game(red, blue, rng)
                start = Outcome.grand(n)
                init = "grand"
            cap = default_cap(n)
            trace = run_is_brd(game, start, rng, cap)
            moves: dict[int, int] = {}
            for step in trace.steps:
                moves[step.agent] = moves.get(step.agent, 0) + 1
            if not trace.converged:
                log.warning("n=%d run %d: IS-BRD did not converge within %d steps", n, run, cap)
            rows.append({
                "kind": kind,
                "model": Model.parse(model).value if kind == "uniform" else "dichotomous",
                "n": n, "red": red, "blue": blue, "run": run, "seed": run_seed, "init": init,
                "iterations": trace.iterations,
                "iterations_per_n2": fmt(Fraction(trace.iterations, n * n)),
                "cap": cap,
                "converged": fmt(trace.converged),
                "max_moves_per_agent": max(moves.values(), default=0),
            })
    return rows


def summarize_convergence(rows: Sequence[dict]) -> dict:
    ratios = [float(r["iterations_per_n2"]) for r in rows]
    return {
        "runs": len(rows),
        "converged": sum(r["converged"] == "true" for r in rows),
        "max_iterations_per_n2": max(ratios, default=0.0),
        "mean_iterations_per_n2": sum(ratios) / len(ratios) if ratios else 0.0,
    }

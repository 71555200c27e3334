"""``hdg`` command-line interface.

Exit codes: 0 success, 1 invalid input, 2 the solver reports that no stable
outcome exists, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .core import Concept, Variant
from .dynamics import initial_outcome, run_is_brd
from .experiments import (
    CONVERGENCE_COLUMNS,
    EXPERIMENT_COLUMNS,
    MEASURE_COLUMNS,
    ExperimentConfig,
    fmt,
    run_convergence_study,
    run_experiment,
    summarize_convergence,
    write_csv,
)
from .measures import measure
from .oracle import brute_force_stable, brute_force_x3c
from .reductions import (
    CANONICAL_NAMES,
    canonical_instance,
    reduce_x3c_to_is_5tuple,
    reduce_x3c_to_ns_hdg,
)
from .rng import derive_seed
from .samplers import Model, sample_game
from .stability import (
    check_stability,
    decide_ns_dichotomous_anonymous,
    decide_ns_xp,
    decide_ns_xp_ktuple,
    find_is_alg1,
)

log = logging.getLogger("hdgames")

EXIT_OK, EXIT_INVALID, EXIT_NONE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _load_game(spec: str):
    """A path to a game JSON file, or ``canonical:NAME``."""
    if spec.startswith("canonical:"):
        return canonical_instance(spec.split(":", 1)[1])
    return io.load_game(spec)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=1))


def _emit_rows(args, rows, columns) -> None:
    if args.format == "json":
        _emit_json(args, rows)
    else:
        _emit(args, write_csv(rows, columns))


def _ints(text: str) -> list[int]:
    """``"2-5,8"`` -> ``[2, 3, 4, 5, 8]``."""
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    if args.canonical:
        _emit_json(args, io.game_to_dict(canonical_instance(args.canonical), {"name": args.canonical}))
        return EXIT_OK
    if args.red is None or args.blue is None:
        raise UsageError("gen needs --red and --blue (or --canonical NAME)")
    model = Model.parse(args.model)
    docs = []
    for i in range(args.count):
        seed = derive_seed(args.seed, i)
        game = sample_game(model, args.red, args.blue, seed)
        docs.append(io.game_to_dict(game, {"model": model.value, "seed": seed, "index": i}))
    if args.out and args.count > 1:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, doc in enumerate(docs):
            io.dump(doc, out / f"{model.value}-r{args.red}b{args.blue}-{i:04d}.json")
        return EXIT_OK
    _emit_json(args, docs[0] if args.count == 1 else docs)
    return EXIT_OK


def cmd_solve(args) -> int:
    game = _load_game(args.game)
    concept = Concept.parse(args.concept)
    algo = args.algo
    if algo == "alg1":
        if concept is not Concept.IS:
            raise UsageError("alg1 computes IS outcomes; use --concept is")
        outcome = find_is_alg1(game)
    elif algo == "xp":
        if concept is not Concept.NS:
            raise UsageError("xp decides NS existence; use --concept ns")
        outcome = decide_ns_xp(game) if game.variant is Variant.HDG2 else decide_ns_xp_ktuple(game)
    elif algo == "anon-dichot":
        if concept is not Concept.NS:
            raise UsageError("anon-dichot decides NS existence; use --concept ns")
        outcome = decide_ns_dichotomous_anonymous(game)
    else:
        outcome = brute_force_stable(game, concept)
    stable = None if outcome is None else check_stability(game, outcome, concept).stable
    _emit_json(args, io.outcome_to_dict(outcome, stable, concept.value))
    return EXIT_NONE if outcome is None else EXIT_OK


def cmd_check(args) -> int:
    game = _load_game(args.game)
    outcome = io.outcome_from_dict(io.load(args.outcome), game.n)
    report = check_stability(game, outcome, args.concept)
    _emit_json(args, report.to_dict())
    return EXIT_OK


def cmd_brd(args) -> int:
    game = _load_game(args.game)
    init_seed = derive_seed(args.seed, 0)
    start = initial_outcome(args.init, game.n, init_seed)
    trace = run_is_brd(game, start, derive_seed(args.seed, 1), args.cap)
    summary = f"converged={str(trace.converged).lower()} steps={trace.iterations} cap={trace.iteration_cap}"
    _emit_json(args, trace.to_dict())
    print(summary, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.target[0] == "x3c":
        if len(args.target) != 2:
            raise UsageError("usage: oracle x3c FILE")
        inst = io.load_x3c(args.target[1])
        cover = brute_force_x3c(inst)
        _emit_json(args, {"cover": None if cover is None else [sorted(c) for c in cover]})
        return EXIT_NONE if cover is None else EXIT_OK
    if len(args.target) != 1:
        raise UsageError("usage: oracle GAME --concept {is,ns}")
    game = _load_game(args.target[0])
    concept = Concept.parse(args.concept)
    outcome = brute_force_stable(game, concept)
    _emit_json(args, io.outcome_to_dict(outcome, None if outcome is None else True, concept.value))
    return EXIT_NONE if outcome is None else EXIT_OK


def cmd_measure(args) -> int:
    doc = io.load(args.game) if not args.game.startswith("canonical:") else None
    game = _load_game(args.game)
    outcome = io.outcome_from_dict(io.load(args.outcome), game.n)
    rep = measure(game, outcome, args.mode)
    meta = (doc or {}).get("meta", {})
    red = game.class_sizes[0]
    row = {
        "game_id": args.game_id or Path(args.game).stem,
        "algo": args.algo,
        "n": game.n,
        "theta_N": fmt(red / game.n),
        "model": meta.get("model", ""),
        "welfare_mode": rep.welfare_mode,
        "welfare": fmt(rep.welfare),
        "avg_size": fmt(rep.avg_size),
        "avg_diversity": fmt(rep.avg_diversity),
        "seed": meta.get("seed", ""),
    }
    _emit_rows(args, [row], MEASURE_COLUMNS)
    return EXIT_OK


def _build_reduction(inst, target: str, strict: bool, dichotomous: bool):
    if target == "ns-hdg":
        return reduce_x3c_to_ns_hdg(inst, strict=strict, dichotomous=dichotomous)
    if dichotomous:
        raise UsageError("--dichotomous applies to the ns-hdg target only")
    return reduce_x3c_to_is_5tuple(inst, strict=strict)


def cmd_reduce(args) -> int:
    if args.target_file[0] == "verify":
        if len(args.target_file) != 2:
            raise UsageError("usage: reduce verify X3C_FILE")
        return _reduce_verify(args, io.load_x3c(args.target_file[1]))
    if len(args.target_file) != 1:
        raise UsageError("usage: reduce X3C_FILE --target {ns-hdg,is-5tuple}")
    inst = io.load_x3c(args.target_file[0])
    art = _build_reduction(inst, args.target, args.strict, args.dichotomous)
    meta = {"reduction": args.target, "strict": args.strict, "dichotomous": args.dichotomous, "source": inst.to_dict()}
    _emit_json(args, io.game_to_dict(art.game, meta))
    if args.out:
        out = Path(args.out)
        io.dump(art.roles_dict(), out.with_name(out.stem + ".roles.json"))
    return EXIT_OK


def _reduce_verify(args, inst) -> int:
    cover = brute_force_x3c(inst)
    checks = []
    variants = [("ns-hdg", False, False), ("ns-hdg", True, False), ("ns-hdg", False, True),
                ("is-5tuple", False, False), ("is-5tuple", True, False)]
    for target, strict, dichotomous in variants:
        art = _build_reduction(inst, target, strict, dichotomous)
        concept = Concept.NS if target == "ns-hdg" else Concept.IS
        found = brute_force_stable(art.game, concept) is not None
        checks.append({
            "target": target, "strict": strict, "dichotomous": dichotomous, "n": art.game.n,
            "stable_outcome_exists": found, "agrees": found == (cover is not None),
        })
    ok = all(c["agrees"] for c in checks)
    _emit_json(args, {"cover_exists": cover is not None, "checks": checks, "ok": ok})
    return EXIT_OK if ok else EXIT_INVALID


def cmd_experiment(args) -> int:
    grids = ["balanced", "ratio"] if args.grid == "all" else [args.grid]
    models = [m.strip() for m in args.models.split(",")]
    algorithms = [a.strip() for a in args.algorithms.split(",")]
    rows = []
    for grid in grids:
        kw = dict(models=models, algorithms=algorithms, master_seed=args.seed, jobs=args.jobs, n=args.n)
        if args.sizes:
            kw["sizes"] = _ints(args.sizes)
        if args.reds:
            kw["reds"] = _ints(args.reds)
        if args.instances:
            kw["instances_per_cell"] = args.instances
        config = ExperimentConfig.full_scale(grid, **kw) if args.full else ExperimentConfig(grid=grid, **kw)
        rows.extend(run_experiment(config))
    _emit_rows(args, rows, EXPERIMENT_COLUMNS)
    return EXIT_OK


def cmd_convergence(args) -> int:
    rows = run_convergence_study(
        args.max_n, args.instances, args.seed, model=args.model, kind=args.kind,
        sizes=_ints(args.sizes) if args.sizes else None,
    )
    _emit_rows(args, rows, CONVERGENCE_COLUMNS)
    s = summarize_convergence(rows)
    print(
        f"runs={s['runs']} converged={s['converged']} "
        f"max_iter_per_n2={s['max_iterations_per_n2']:.4g} mean_iter_per_n2={s['mean_iterations_per_n2']:.4g}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="master seed (default 0)")
    parser.add_argument("--out", default=d(None), help="output file (stdout if omitted)")
    parser.add_argument("--format", choices=["json", "csv"], default=d("csv"),
                        help="tabular output format for measure/experiment/convergence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdg", description="Hedonic diversity games: solvers, dynamics and experiments.")
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)
    game_help = "game JSON file or canonical:NAME (" + ", ".join(CANONICAL_NAMES) + ")"

    p = sub.add_parser("gen", parents=[common], help="sample games")
    p.add_argument("--model", default="usp", help="usp, upsp or symsp")
    p.add_argument("--red", type=int)
    p.add_argument("--blue", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--canonical", choices=CANONICAL_NAMES, help="emit a published example game instead")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[common], help="compute or decide a stable outcome")
    p.add_argument("game", help=game_help)
    p.add_argument("--concept", choices=["is", "ns"], required=True)
    p.add_argument("--algo", choices=["alg1", "xp", "anon-dichot", "brute"], required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="check an outcome for stability")
    p.add_argument("game", help=game_help)
    p.add_argument("outcome", help="outcome JSON file")
    p.add_argument("--concept", choices=["is", "ns"], required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("brd", parents=[common], help="run IS better-response dynamics")
    p.add_argument("game", help=game_help)
    p.add_argument("--cap", type=int, default=None, help="iteration cap (default 10 n^2)")
    p.add_argument("--init", choices=["grand", "singletons", "uniform"], default="uniform")
    p.set_defaults(func=cmd_brd)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive search (GAME, or x3c FILE)")
    p.add_argument("target", nargs="+")
    p.add_argument("--concept", choices=["is", "ns"], default="ns")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("measure", parents=[common], help="welfare, size and diversity of an outcome")
    p.add_argument("game", help=game_help)
    p.add_argument("outcome", help="outcome JSON file")
    p.add_argument("--mode", choices=["borda", "symmetric"], default=None)
    p.add_argument("--algo", default="")
    p.add_argument("--game-id", default=None)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("reduce", parents=[common], help="build X3C reduction games (or: reduce verify FILE)")
    p.add_argument("target_file", nargs="+", metavar="X3C_FILE")
    p.add_argument("--target", choices=["ns-hdg", "is-5tuple"], default="ns-hdg")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--dichotomous", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("experiment", parents=[common], help="Alg1 vs IS-BRD comparison as CSV")
    p.add_argument("--grid", choices=["balanced", "ratio", "all"], default="all")
    p.add_argument("--models", default="uSP,upSP,symSP")
    p.add_argument("--algorithms", default="alg1,is-brd")
    p.add_argument("--sizes", help="balanced grid s values, e.g. 2-25")
    p.add_argument("--reds", help="ratio grid red counts, e.g. 0,5,10")
    p.add_argument("--n", type=int, default=50, help="ratio grid total agents")
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--full", action="store_true", help="s = 2..50, every red count, 1000 instances")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("convergence", parents=[common], help="IS-BRD iteration counts as CSV")
    p.add_argument("--max-n", type=int, default=40)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--sizes", help="explicit n values, e.g. 4,10,40")
    p.add_argument("--model", default="usp")
    p.add_argument("--kind", choices=["uniform", "dichotomous"], default="uniform")
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"hdg: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("internal error")
        print(f"hdg: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Solvers, dynamics and experiments for hedonic diversity games."""

from .core import (
    EMPTY,
    Cmp,
    Concept,
    Deviation,
    Game,
    GameError,
    Outcome,
    PreferenceOrder,
    ThetaSet,
    Variant,
    all_deviations,
    apply_deviation,
    build_theta_set,
    coalition_ratio,
    compare_for_agent,
    find_deviation,
    pareto_dominates,
    validate_outcome,
)
from .dynamics import BRDTrace, run_is_brd, sample_uniform_partition
from .experiments import ExperimentConfig, run_convergence_study, run_experiment
from .measures import MeasureReport, average_diversity, average_size, average_welfare, measure
from .oracle import X3CInstance, brute_force_stable, brute_force_x3c, enumerate_partitions
from .reductions import (
    anonymous_to_khdg,
    canonical_instance,
    cover_to_is_outcome,
    cover_to_ns_outcome,
    f_map,
    reduce_x3c_to_is_5tuple,
    reduce_x3c_to_ns_hdg,
)
from .samplers import Model, sample_game, sample_preference
from .stability import (
    StabilityReport,
    check_stability,
    decide_ns_dichotomous_anonymous,
    decide_ns_xp,
    decide_ns_xp_ktuple,
    find_is_alg1,
    knapsack_compose,
    max_flow,
)

__version__ = "0.1.0"

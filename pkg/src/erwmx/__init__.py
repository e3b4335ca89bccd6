"""Elephant random walks with multiple extractions.

Simulator, exact-distribution oracle, and mean-field analyzer for +/-1 random
walks whose step law depends on k past steps sampled with or without
replacement through a reinforcement function f.
"""

from .analysis import (
    GROWING_LIMIT,
    ConditionReport,
    ConstantK,
    FixedPointScan,
    GrowingLimit,
    Regime,
    RegimeReport,
    check_conditions,
    classify_regime,
    compute_tau,
    find_fixed_points,
    predicted_clt,
)
from .drift import (
    DriftContext,
    PolynomialForm,
    SamplingMode,
    binom_pmf,
    binom_row,
    eval_F_n,
    eval_g,
    eval_ghat,
    eval_H,
    eval_H_prime,
    eval_H_second,
    eval_hhat,
    h_coefficients,
    hypergeom_pmf,
    hypergeom_row,
)
from .errors import (
    BudgetError,
    ConfigError,
    DegenerateError,
    DegreeError,
    DomainError,
    ErwmxError,
    NonUniqueFixedPointError,
    NumericalError,
    PlanError,
    RangeError,
    RegimeError,
    RegularityError,
    ScheduleError,
    TauNonpositiveError,
)
from .experiment import (
    ExperimentPlan,
    ExperimentResult,
    KsResult,
    MomentSummary,
    StabilizationTable,
    dyadic_checkpoints,
    ks_test_normal,
    moment_summary,
    run_experiment,
    superdiffusive_stability,
)
from .oracle import ExactPmf, exact_distribution, exact_moments, transition_row, write_pmf_csv
from .reinforce import (
    ReinforcementSpec,
    affine_decreasing,
    constant,
    custom,
    derivative_f,
    evaluate_f,
    exponential,
    linear,
    majority,
    modulus_of_continuity_bound,
    quadratic,
    table,
)
from .walk import (
    COLLAPSED,
    LITERAL,
    KSchedule,
    ModelConfig,
    Trajectory,
    draw_binomial,
    draw_hypergeometric,
    k_schedule_eval,
    simulate,
    step_probability,
    substream,
)

__version__ = "0.1.0"

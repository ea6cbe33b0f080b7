"""Curvature-aware submodular optimization toolkit."""

from .core import GroundSet, QuerySession, Subset, TABLE_LIMIT
from .curvature import (
    CurvatureReport,
    DecomposedFunction,
    curve_normalize,
    estimate_curvature_from_samples,
    hat_curvature,
    set_curvature,
    tilde_curvature,
    total_curvature,
)
from .errors import (
    CertificationError,
    GraphParseError,
    IncompleteSampleError,
    InfeasibleConstraintError,
    InvalidDatasetError,
    InvalidInstanceError,
    InvalidOverrideError,
    LearningFailureError,
    NonSubmodularError,
    ScaleError,
    ZeroSingletonError,
)
from .graphs import Graph, parse_graph
from .approx import (
    CorrectedSurrogate,
    FactorReport,
    ScaledModularFit,
    SqrtModularFit,
    approximation_factor,
    corrected_factor,
    corrected_surrogate,
    fit_sqrt_modular,
    modular_upper_bound,
    scaled_modular_fit,
)
from .learn import (
    Dataset,
    LearnedModel,
    PmacReport,
    classifies_all,
    evaluate_pmac,
    explicit_separator,
    learn_direct,
    learn_separator,
    pmac_learn_curvature,
    reduce_to_separator,
    sample_dataset,
)
from .minimize import (
    CardinalityLB,
    ConstraintFamily,
    PerfectMatching,
    STCut,
    STPath,
    SolveResult,
    SpanningTree,
    brute_force_min,
    minimize_ea,
    minimize_mub,
    solve_modular,
    table1_bound,
)
from .oracles import (
    ValueOracle,
    evaluate,
    make_concave_over_modular,
    make_hidden_set,
    make_modular,
    make_modulated,
    make_sqrt_modular,
    make_tabulated,
    make_truncation,
    singleton_vector,
)
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    ResultRow,
    emit_csv,
    instance_shape,
    make_instance,
    parse_config,
    run_experiment,
    theoretical_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

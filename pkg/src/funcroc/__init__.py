"""ROC-curve analysis of functional biomarkers.

Estimate discriminant indexes from two samples of curves, summarize their
discriminating power through empirical ROC/AUC/Youden statistics, compare
against closed-form binormal results, and reproduce simulation studies
with built-in Gaussian-process scenario generators.
"""

from .binormal import (
    GaussianPair,
    auc_of_direction,
    binormal_roc,
    eigenbasis_optimal_direction,
    optimal_auc_direction,
    pooled_correlation_identity,
    youden_direction,
)
from .errors import (
    CurveParseError,
    DegenerateDirectionError,
    DegenerateOperatorError,
    FuncrocError,
    GridMismatchError,
    InsufficientSampleError,
    InvalidKernelError,
    NumericalDegeneracyError,
    RangeViolationError,
    SimulationDegeneracyError,
    SingularCovarianceError,
    SingularSystemError,
)
from .estimation import (
    CovarianceKernel,
    EigenSystem,
    choose_dimension,
    combine_covariances,
    eigendecompose,
    project_scores,
    sample_covariance,
    sample_mean,
)
from .grids import (
    Curve,
    FunctionalSample,
    Grid,
    Group,
    inner_product,
    make_uniform_grid,
    norm,
)
from .harness import (
    INDEX_NAMES,
    ReplicationResult,
    RunConfig,
    StudyReport,
    analyze,
    emit_report,
    ingest_curves,
    run_replication,
    run_study,
)
from .indexes import (
    DiscriminantIndex,
    IntegralIndex,
    LinearIndex,
    MaxIndex,
    MinIndex,
    PenaltySpec,
    QuadraticIndex,
    apply_index,
    fit_mean_difference,
    fit_optimal_linear,
    fit_quadratic,
    index_scores,
    quadratic_population,
    second_difference_penalty,
)
from .rocmetrics import (
    RocSummary,
    ScoreSample,
    auc,
    default_p_grid,
    ecdf,
    equantile,
    roc_curve,
    score_sample,
    youden,
)
from .simulation import (
    SCENARIO_NAMES,
    ProcessSpec,
    ScenarioSpec,
    generate_scenario,
    kernel_matrix,
    sample_gaussian,
    sine_eigenfunction,
)

__version__ = "0.1.0"

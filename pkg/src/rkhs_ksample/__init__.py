"""Regularized kernel mean-embedding test for the k-sample problem."""
from .errors import (
    DegenerateKernelMatrix,
    DimensionMismatch,
    InvalidAlpha,
    InvalidParameters,
    KSampleError,
    NumericalFailure,
    ParseError,
    ShapeMismatch,
    SingularSystem,
    ValidationError,
)
from .inference import TestReport, decide, std_normal_cdf
from .kernels import KernelFamily, KernelSpec, eval_kernel, gram
from .oracle import OracleReport, dense_center_matrix, oracle_statistic
from .sample import GroupLayout, MultiSample, load_csv, to_csv, validate, write_csv
from .simulation import (
    CASES,
    CaseSpec,
    DistSpec,
    PowerCurve,
    run_null_distribution_study,
    run_power_study,
    sample_dist,
)
from .statistic import (
    RegularizationPolicy,
    StatisticBreakdown,
    center_apply,
    contrast_vector,
    gamma_for,
    statistic,
)


def k_sample_test(sample, alpha=0.05, kernel=None, policy=None) -> TestReport:
    """Run the full test on a MultiSample and return its report."""
    return decide(statistic(sample, kernel, policy), alpha)

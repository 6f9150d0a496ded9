"""Minimum modulus of random trigonometric polynomials, Monte Carlo toolkit.

The scaled minimum n * min|P| of a degree-n polynomial with i.i.d. unit
variance coefficients converges to an exponential law, and the deep local
minima form a Poisson point process.  This package samples the models,
evaluates polynomials on fine nets through the FFT, certifies global
minima, extracts the near-minima process, and measures the limit laws,
with support for real-coefficient and perturbed-coefficient variants.
"""

from .coeffs import (
    CoefficientModel,
    InvalidModelError,
    RngSpec,
    derive_trial_stream,
    resolve_delta,
    sample_coefficients,
)
from .poly import (
    KernelValue,
    TrigPolynomial,
    evaluate,
    evaluate_with_derivatives,
    kernel,
    sigma_n,
)
from .neteval import (
    Net,
    NetParameterError,
    build_net,
    direct_net_evaluation,
    evaluate_on_net,
    net_from_size,
)
from .extremal import (
    CandidateRecord,
    DegenerateSlopeError,
    EventThresholds,
    GlobalMinResult,
    NearMinimaProcess,
    NumericFailureError,
    candidate_record,
    extract_process,
    global_min,
    linear_min,
    second_derivative_sup_bound,
)
from .stats import (
    EXP_RATE,
    INTENSITY,
    KsResult,
    PoissonDiagnostics,
    SurvivalCurve,
    default_tau_grid,
    empirical_survival,
    intensity_estimate,
    ks_exponential,
    poisson_diagnostics,
    separation_statistic,
)
from .perturb import (
    InvarianceReport,
    MatchedPoint,
    PerturbTrial,
    build_perturb_trial,
    invariance_report,
    match_and_shift,
    perturb_polynomial,
)
from .realcase import (
    RealCaseConfig,
    RealCaseReport,
    ZoneMinima,
    exclusion_zone_min,
    limit_rate,
    real_correlations,
    realcase_pipeline,
    restrict_to_stationary,
)
from .cli import RunConfig, main, parse_config, run, serialize_config

__version__ = "0.1.0"

__all__ = [
    "CoefficientModel",
    "InvalidModelError",
    "RngSpec",
    "derive_trial_stream",
    "resolve_delta",
    "sample_coefficients",
    "KernelValue",
    "TrigPolynomial",
    "evaluate",
    "evaluate_with_derivatives",
    "kernel",
    "sigma_n",
    "Net",
    "NetParameterError",
    "build_net",
    "direct_net_evaluation",
    "evaluate_on_net",
    "net_from_size",
    "CandidateRecord",
    "DegenerateSlopeError",
    "EventThresholds",
    "GlobalMinResult",
    "NearMinimaProcess",
    "NumericFailureError",
    "candidate_record",
    "extract_process",
    "global_min",
    "linear_min",
    "second_derivative_sup_bound",
    "EXP_RATE",
    "INTENSITY",
    "KsResult",
    "PoissonDiagnostics",
    "SurvivalCurve",
    "default_tau_grid",
    "empirical_survival",
    "intensity_estimate",
    "ks_exponential",
    "poisson_diagnostics",
    "separation_statistic",
    "InvarianceReport",
    "MatchedPoint",
    "PerturbTrial",
    "build_perturb_trial",
    "invariance_report",
    "match_and_shift",
    "perturb_polynomial",
    "RealCaseConfig",
    "RealCaseReport",
    "ZoneMinima",
    "exclusion_zone_min",
    "limit_rate",
    "real_correlations",
    "realcase_pipeline",
    "restrict_to_stationary",
    "RunConfig",
    "main",
    "parse_config",
    "run",
    "serialize_config",
]

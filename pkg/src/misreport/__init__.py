"""Latent-ARMA modelling of randomly misreported continuous time series.

A recorded series y_t equals the latent stationary ARMA process x_t with
probability 1 - omega and q * x_t with probability omega. The package
estimates (q, omega) together with the ARMA parameters, reconstructs the
most likely latent series, flags misreporting from the ACF, and quantifies
uncertainty by parametric bootstrap.
"""

__version__ = "0.1.0"

from .arma import (
    ArmaFit,
    ArmaParams,
    ValidationResult,
    coef_standard_errors,
    fit,
    loglik,
    simulate,
    stationary_mean,
    stationary_variance_closed_form,
    stationary_variance_exact,
    theoretical_acf,
    theoretical_acvf,
    validate,
)
from .bootstrap import BootstrapSummary, ParamSummary, parametric_bootstrap
from .detect import (
    AcfEstimate,
    DetectionReport,
    detect_misreporting,
    log_acf_regression,
    sample_acf,
)
from .errors import (
    DataError,
    EstimationError,
    InvalidParamsError,
    MisreportError,
    MixtureDegeneracyError,
    NonIdentifiableError,
)
from .mixture import (
    LabeledMixture,
    MixtureParams,
    Responsibilities,
    em_fit,
    em_fit_weights_only,
    label_components,
)
from .model import (
    EstimateOptions,
    FitResult,
    MisreportModel,
    ObservedSample,
    acf_damping_factor,
    estimate,
    observed_mean,
    observed_variance,
    reconstruct,
    simulate_observed,
)
from .series import Series
from .simstudy import GridSpec, MetricsRow, ReplicateRecord, run_grid, sample_size_sweep

__all__ = [
    "__version__",
    "AcfEstimate", "ArmaFit", "ArmaParams", "BootstrapSummary", "DataError",
    "DetectionReport", "EstimateOptions", "EstimationError", "FitResult",
    "GridSpec", "InvalidParamsError", "LabeledMixture", "MetricsRow",
    "MisreportError", "MisreportModel", "MixtureDegeneracyError",
    "MixtureParams", "NonIdentifiableError", "ObservedSample", "ParamSummary",
    "ReplicateRecord", "Responsibilities", "Series", "ValidationResult",
    "acf_damping_factor", "coef_standard_errors", "detect_misreporting",
    "em_fit", "em_fit_weights_only", "estimate", "fit", "label_components",
    "log_acf_regression", "loglik", "observed_mean", "observed_variance",
    "parametric_bootstrap", "reconstruct", "run_grid", "sample_acf",
    "sample_size_sweep", "simulate", "simulate_observed", "stationary_mean",
    "stationary_variance_closed_form", "stationary_variance_exact",
    "theoretical_acf", "theoretical_acvf", "validate",
]

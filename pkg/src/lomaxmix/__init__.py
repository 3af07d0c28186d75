"""lomaxmix: finite mixtures of discrete Lomax distributions for heavy-tailed counts.

Fit mixture models to count data by maximum likelihood, select the model
order by AIC, test goodness of fit with Pearson's chi-square, compare
against power-law and lognormal baselines, and generate synthetic data
from the gamma-mixed geometric mechanism the model is built on.
"""

from .distributions import (
    GammaMixing,
    GeometricState,
    LomaxComponent,
    MixtureModel,
    RankModel,
    continuous_lomax_pdf,
    geometric_pmf,
    lognormal_asymptote,
    mixture_ccdf,
    mixture_log_pmf,
    mixture_pmf,
    rank_frequency,
    rank_of_size,
)
from .errors import (
    DegenerateDataError,
    DomainError,
    FitError,
    InputFormatError,
    InsufficientResolutionError,
    LomaxMixError,
    ValidationError,
)
from .fitting import (
    BaselineResult,
    CountSample,
    FitConfig,
    FitResult,
    ScanResult,
    aic,
    fit_lognormal,
    fit_mixture,
    fit_power_law,
    log_likelihood,
    n_params_for_order,
    scan_orders,
)
from .gof import EmpiricalCcdf, GofBin, GofReport, chi_square_test, empirical_ccdf
from .ingest import (
    MessageEvent,
    ReplyDelaySample,
    discretize,
    extract_reply_delays,
    load_counts,
    parse_message_log,
    save_counts,
)
from .simulate import (
    CompetingObservablesConfig,
    CompetingObservablesResult,
    sample_geometric_state,
    sample_mixture,
    simulate_competing_observables,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # distributions
    "LomaxComponent",
    "MixtureModel",
    "GeometricState",
    "GammaMixing",
    "RankModel",
    "geometric_pmf",
    "mixture_pmf",
    "mixture_ccdf",
    "mixture_log_pmf",
    "continuous_lomax_pdf",
    "rank_of_size",
    "rank_frequency",
    "lognormal_asymptote",
    # fitting
    "CountSample",
    "FitConfig",
    "FitResult",
    "ScanResult",
    "BaselineResult",
    "n_params_for_order",
    "aic",
    "log_likelihood",
    "fit_mixture",
    "scan_orders",
    "fit_power_law",
    "fit_lognormal",
    # gof
    "GofReport",
    "GofBin",
    "EmpiricalCcdf",
    "empirical_ccdf",
    "chi_square_test",
    # ingest
    "MessageEvent",
    "ReplyDelaySample",
    "parse_message_log",
    "extract_reply_delays",
    "discretize",
    "load_counts",
    "save_counts",
    # simulate
    "CompetingObservablesConfig",
    "CompetingObservablesResult",
    "sample_mixture",
    "sample_geometric_state",
    "simulate_competing_observables",
    # errors
    "LomaxMixError",
    "DomainError",
    "ValidationError",
    "InputFormatError",
    "DegenerateDataError",
    "FitError",
    "InsufficientResolutionError",
]

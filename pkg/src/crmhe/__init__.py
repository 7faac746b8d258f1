"""Cumulative residual Mathai-Haubold entropy and its dynamic (residual-life) version.

Exact values for common lifetime families, tail-aware quadrature, kernel
plug-in estimators, seeded Monte Carlo studies and a bootstrap pipeline for
real data.
"""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    FAMILIES,
    GPD,
    Exponential,
    Lifetime,
    ParetoI,
    ParetoII,
    ProportionalHazards,
    Uniform,
    Weibull,
    make_distribution,
)
from .entropy import (  # noqa: E402
    EntropyQuery,
    EntropyValue,
    check_alpha,
    crmhe,
    crmhe_closed_form,
    crmhe_quadrature,
    dcrmhe,
    tabulated_crmhe,
)
from .errors import (  # noqa: E402
    CRMHEError,
    DegenerateSample,
    DivergentEntropy,
    DomainError,
    FitError,
    InvalidParameterError,
    TruncationBeyondSupport,
)
from .kernel import (  # noqa: E402
    EmpiricalSurvival,
    KernelEstimatorConfig,
    estimate_crmhe,
    estimate_dcrmhe,
    silverman_bandwidth,
)
from .simulation import SimulationPlan, SimulationReport, load_plan, run_simulation  # noqa: E402
from .inference import (  # noqa: E402
    Dataset,
    FitResult,
    analyze,
    bootstrap_dcrmhe,
    fit_weibull_mle,
    ks_statistic,
    load_dataset,
)

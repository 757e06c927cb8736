"""Cyber-risk quantification from report-derived factor data.

Estimates a company's expected annualized cyberattack cost and its cyber
value at risk (CVaR) by combining size, time, and factor scalers with a
heavy-tailed cost distribution fitted to report-extracted samples.
"""

from .dataset import (
    CANONICAL_FACTORS,
    CostSample,
    Dataset,
    DatasetWarning,
    EconomicConstants,
    FactorParameter,
    FactorTable,
    Observation,
    ReportSource,
    bundled_dataset_path,
    load_bundled_dataset,
    load_dataset,
    save_dataset,
    serialize_dataset,
    validate_dataset,
)
from .distribution import (
    DistributionFamily,
    EmpiricalCdf,
    FittedDistribution,
    bessel_k,
    cdf,
    ecdf,
    fit,
    fit_all,
    gig_pdf,
    ks_pvalue,
    ks_statistic,
    mean,
    pdf,
    quantile,
    scale_to_mean,
)
from .errors import (
    DatasetError,
    DistributionError,
    EstimationError,
    FitError,
    RcvarError,
    UnknownSelectionError,
)
from .estimator import (
    ACTIONABLE_FACTORS,
    BreakdownStep,
    CompanyProfile,
    EstimateResult,
    Recommendation,
    estimate,
    estimate_cost,
    estimate_cvar,
    recommend_action,
)
from .scalers import (
    DiscountFactor,
    DiscountKind,
    RegressionResult,
    average_cv_ratio,
    avg_factor,
    cv_ratio,
    fit_discount_factor,
    parameter_ratio,
    scale_in_time,
)

__version__ = "0.1.0"

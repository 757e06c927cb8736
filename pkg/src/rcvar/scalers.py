"""Size, time, and factor scalers.

Three conversions put report-derived cost data and company inputs on a
common footing:

* size: the cost-to-valuation conversion ratio (``cv_ratio``),
* time: multiplicative annual discounting/capitalization (``scale_in_time``),
* factor: per-parameter relative cost ratios (``parameter_ratio``).

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DiscountKind",
    "DiscountFactor",
    "RegressionResult",
    "cv_ratio",
    "average_cv_ratio",
    "scale_in_time",
    "fit_discount_factor",
    "avg_factor",
    "parameter_ratio",
]


class DiscountKind(str, enum.Enum):
    VALUATION = "valuation"
    COST = "cost"


@dataclass(frozen=True)
class DiscountFactor:
    """Annual multiplicative discount factor (>1 means growth)."""

    value: float
    kind: DiscountKind = DiscountKind.COST

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"discount factor must be positive and finite, got {self.value}")


@dataclass(frozen=True)
class RegressionResult:
    """Log-linear trend fit of a cumulative value series.

    ``beta`` is the implied annual growth rate, i.e. exp(slope) - 1 of the
    ordinary least squares fit of ln(value) on year.
    """

    beta: float
    intercept: float
    r_squared: float
    n_points: int

    @property
    def discount_factor(self) -> float:
        """The annual multiplier 1 + beta implied by the regression."""
        return 1.0 + self.beta


def cv_ratio(total_avg_cost: float, avg_market_cap: float) -> float:
    """Cost-to-valuation conversion ratio for one year.

    Divides the average per-company annualized cost by the mean market
    capitalization of the reference index for the same year.
    """
    if not total_avg_cost > 0:
        raise ValueError(f"total_avg_cost must be positive, got {total_avg_cost}")
    if not avg_market_cap > 0:
        raise ValueError(f"avg_market_cap must be positive, got {avg_market_cap}")
    return total_avg_cost / avg_market_cap


def average_cv_ratio(yearly_ratios: Sequence[float]) -> float:
    """Average the conversion ratio over multiple years for robustness."""
    if len(yearly_ratios) == 0:
        raise ValueError("yearly_ratios must not be empty")
    if any(r <= 0 for r in yearly_ratios):
        raise ValueError("all yearly ratios must be positive")
    return float(np.mean(yearly_ratios))


def scale_in_time(present_value: float, discount: DiscountFactor | float, t: int) -> float:
    """Move a monetary value ``t`` years forward (or back, for negative ``t``).

    Multiplies the present value by the annual discount factor ``t`` times;
    ``t`` = 0 is the identity.
    """
    if present_value < 0:
        raise ValueError(f"present_value must be non-negative, got {present_value}")
    factor = discount.value if isinstance(discount, DiscountFactor) else float(discount)
    if not (factor > 0 and math.isfinite(factor)):
        raise ValueError(f"discount factor must be positive and finite, got {factor}")
    return present_value * factor ** t


def fit_discount_factor(series: Iterable[tuple[int, float]]) -> RegressionResult:
    """Fit an annual growth rate to a cumulative value series.

    Ordinary least squares of ln(value) on year; growth is multiplicative,
    so a series growing at an exact rate g recovers beta = g with r² = 1.
    """
    points = [(int(y), float(v)) for y, v in series]
    if len(points) < 3:
        raise ValueError(f"need at least 3 points, got {len(points)}")
    years = np.array([p[0] for p in points], dtype=float)
    values = np.array([p[1] for p in points], dtype=float)
    if np.any(values <= 0):
        raise ValueError("all series values must be positive")
    if len(set(years)) != len(years):
        raise ValueError("duplicate-year: series years must be distinct")

    log_values = np.log(values)
    slope, intercept = np.polyfit(years, log_values, 1)
    predicted = slope * years + intercept
    ss_res = float(np.sum((log_values - predicted) ** 2))
    ss_tot = float(np.sum((log_values - log_values.mean()) ** 2))
    # a numerically flat series is fitted perfectly by its own mean; below
    # this floor ss_tot is rounding noise and the ratio ss_res/ss_tot is
    # meaningless
    noise_floor = len(points) * (8 * np.finfo(float).eps
                                 * max(1.0, float(np.max(np.abs(log_values))))) ** 2
    r_squared = 1.0 if ss_tot <= noise_floor else 1.0 - ss_res / ss_tot
    # guard against float dust pushing r² out of [0, 1]
    r_squared = min(max(r_squared, 0.0), 1.0)
    return RegressionResult(
        beta=float(math.expm1(slope)),
        intercept=float(intercept),
        r_squared=r_squared,
        n_points=len(points),
    )


def avg_factor(cost_params: Sequence[float]) -> float:
    """Mean cost over the k parameters of one factor in one report."""
    if len(cost_params) == 0:
        raise ValueError("cost_params must not be empty")
    values = np.asarray(cost_params, dtype=float)
    # the mean of a constant list is that constant, without summation dust
    if np.all(values == values[0]):
        return float(values[0])
    return float(np.mean(values))


def parameter_ratio(observations: Sequence[tuple[float, float, float]]) -> float:
    """Relative cost deviation of one parameter, averaged across reports.

    Each observation is a (cost_param, avg_factor, avg_report) triple from
    one report; the per-report deviation (cost_param - avg_factor) is
    normalized by the report's overall sample average, making the result
    dimensionless, then averaged over the n reports where the parameter
    appears.
    """
    if len(observations) == 0:
        raise ValueError("observations must not be empty")
    total = 0.0
    for cost_param, factor_average, report_average in observations:
        if report_average <= 0:
            raise ValueError(f"zero avg_report: report average must be positive, got {report_average}")
        total += (cost_param - factor_average) / report_average
    return total / len(observations)

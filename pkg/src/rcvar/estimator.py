"""Company cost estimation, CVaR derivation, and what-if action ranking.

The estimation chain discounts the company valuation back to the report
base year, converts it to an expected annualized cost through the
cost-to-valuation ratio, capitalizes that cost to the requested target
year, and multiplies in one (1 + ratio) term per selected factor.
Unselected factors contribute exactly 1. The CVaR is the confidence
quantile of the reference cost distribution rescaled so its mean equals
the expected cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .dataset import CANONICAL_FACTORS, Dataset, EconomicConstants, FactorTable
from .distribution import FittedDistribution, quantile, scale_to_mean
from .errors import EstimationError, UnknownSelectionError

__all__ = [
    "ACTIONABLE_FACTORS",
    "CompanyProfile",
    "BreakdownStep",
    "EstimateResult",
    "Recommendation",
    "estimate_cost",
    "estimate_cvar",
    "estimate",
    "recommend_action",
]

# Factors a company can act on; the remaining five describe what the
# company is, not what it does about security.
ACTIONABLE_FACTORS = (
    "Cloud Model",
    "Employee Training",
    "Cyber Insurance",
    "Multi-factor Authentication",
    "Identity Access Management",
    "Security Measures",
)


@dataclass(frozen=True)
class CompanyProfile:
    """Inputs describing the company an estimate is produced for."""

    valuation: float
    valuation_year: int
    target_year: int
    selections: Mapping[str, str] = field(default_factory=dict)
    confidence: float = 0.95

    def __post_init__(self):
        if not (self.valuation > 0 and math.isfinite(self.valuation)):
            raise EstimationError(f"valuation must be positive and finite, got {self.valuation}")
        if not 0.5 < self.confidence < 1.0:
            raise EstimationError(f"confidence must lie in (0.5, 1), got {self.confidence}")

    def with_selection(self, factor: str, parameter: str) -> "CompanyProfile":
        selections = dict(self.selections)
        selections[factor] = parameter
        return CompanyProfile(
            valuation=self.valuation,
            valuation_year=self.valuation_year,
            target_year=self.target_year,
            selections=selections,
            confidence=self.confidence,
        )


@dataclass(frozen=True)
class BreakdownStep:
    """One multiplicative step of the estimation chain."""

    step: str
    multiplier: float


@dataclass(frozen=True)
class EstimateResult:
    """Expected annualized cost, its CVaR, and the multiplier trace.

    The product of the breakdown multipliers applied to the input valuation
    reproduces ``expected_cost``.
    """

    expected_cost: float
    cvar: float | None
    confidence: float
    breakdown: tuple[BreakdownStep, ...]

    def to_dict(self) -> dict:
        return {
            "expected_cost": self.expected_cost,
            "cvar": self.cvar,
            "confidence": self.confidence,
            "breakdown": [{"step": s.step, "multiplier": s.multiplier} for s in self.breakdown],
        }


def _validate_selections(selections: Mapping[str, str],
                         factors: Mapping[str, FactorTable]) -> None:
    for factor_name, parameter_name in selections.items():
        if factor_name not in CANONICAL_FACTORS or factor_name not in factors:
            raise UnknownSelectionError(factor_name)
        if factors[factor_name].parameter(parameter_name) is None:
            raise UnknownSelectionError(factor_name, parameter_name)


def estimate_cost(profile: CompanyProfile, constants: EconomicConstants,
                  factors: tuple[FactorTable, ...]) -> EstimateResult:
    """Expected annualized cyberattack cost for a company profile.

    The valuation, stated for ``valuation_year``, is discounted back to the
    report base year, converted to cost, capitalized to ``target_year``
    (which may precede the base year), and adjusted by every selected
    factor's (1 + ratio) multiplier in canonical factor order. The returned
    result carries no CVaR; see :func:`estimate_cvar` / :func:`estimate`.
    """
    if profile.valuation_year < constants.base_year:
        raise EstimationError(
            f"valuation_year {profile.valuation_year} precedes the dataset base year "
            f"{constants.base_year}")
    factor_map = {t.factor: t for t in factors}
    _validate_selections(profile.selections, factor_map)

    t_valuation = profile.valuation_year - constants.base_year
    t_cost = profile.target_year - constants.base_year

    steps = [
        BreakdownStep("valuation_discount", constants.discount_valuation ** (-t_valuation)),
        BreakdownStep("cv_ratio", constants.cv_ratio),
        BreakdownStep("cost_capitalization", constants.discount_cost ** t_cost),
    ]
    for factor_name in CANONICAL_FACTORS:
        if factor_name in profile.selections:
            parameter_name = profile.selections[factor_name]
            parameter = factor_map[factor_name].parameter(parameter_name)
            steps.append(BreakdownStep(
                f"factor:{factor_name}={parameter_name}", 1.0 + parameter.ratio))

    expected = profile.valuation
    for step in steps:
        expected *= step.multiplier
    if not expected > 0:
        raise EstimationError(f"resulting multiplier chain is non-positive ({expected})")
    return EstimateResult(
        expected_cost=expected,
        cvar=None,
        confidence=profile.confidence,
        breakdown=tuple(steps),
    )


def estimate_cvar(expected_cost: float, dist: FittedDistribution, confidence: float) -> float:
    """CVaR: the confidence quantile of the cost distribution rescaled to the expected cost."""
    if not expected_cost > 0:
        raise EstimationError(f"expected_cost must be positive, got {expected_cost}")
    return quantile(confidence, scale_to_mean(dist, expected_cost))


def estimate(profile: CompanyProfile, dataset: Dataset) -> EstimateResult:
    """Full estimate against a loaded dataset: expected cost plus CVaR."""
    result = estimate_cost(profile, dataset.constants, dataset.factors)
    cvar = estimate_cvar(result.expected_cost, dataset.reference_fit(), profile.confidence)
    return EstimateResult(
        expected_cost=result.expected_cost,
        cvar=cvar,
        confidence=result.confidence,
        breakdown=result.breakdown,
    )


@dataclass(frozen=True)
class Recommendation:
    """A cost-reducing change of one actionable factor."""

    factor: str
    current: str | None
    parameter: str
    new_expected_cost: float
    delta: float

    def to_dict(self) -> dict:
        return {
            "factor": self.factor,
            "from": self.current,
            "to": self.parameter,
            "new_expected_cost": self.new_expected_cost,
            "delta": self.delta,
        }


def recommend_action(profile: CompanyProfile, dataset: Dataset) -> list[Recommendation]:
    """Rank security actions by how much they reduce the expected cost.

    Every alternative parameter of every actionable factor is evaluated
    through the full estimation chain; only strictly cost-reducing changes
    are returned, ordered by ascending new expected cost with a
    deterministic (factor, parameter) lexicographic tie-break.
    """
    baseline = estimate_cost(profile, dataset.constants, dataset.factors).expected_cost
    available = {t.factor: t for t in dataset.factors}
    recommendations = []
    for factor_name in ACTIONABLE_FACTORS:
        table = available.get(factor_name)
        if table is None:
            continue
        current = profile.selections.get(factor_name)
        for parameter in table.parameters:
            if parameter.name == current:
                continue
            candidate = profile.with_selection(factor_name, parameter.name)
            new_cost = estimate_cost(candidate, dataset.constants, dataset.factors).expected_cost
            delta = new_cost - baseline
            if delta < 0:
                recommendations.append(Recommendation(
                    factor=factor_name,
                    current=current,
                    parameter=parameter.name,
                    new_expected_cost=new_cost,
                    delta=delta,
                ))
    recommendations.sort(key=lambda r: (r.new_expected_cost, r.factor, r.parameter))
    return recommendations

"""Report-derived reference data: loading, validation, and serialization.

A dataset directory holds four UTF-8 JSON files: ``reports.json`` (the
source reports and their overall sample averages), ``factors.json`` (the
11 cost factors with per-report parameter observations and averaged
ratios), ``samples.json`` (annualized per-company cost series), and
``constants.json`` (discount factors and the cost-to-valuation ratio).

Loaded datasets are immutable and safe for concurrent read access; all
monetary values are USD.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import scalers
from .distribution import MIN_FIT_SAMPLE, DistributionFamily, FittedDistribution, fit
from .errors import DatasetError

__all__ = [
    "CANONICAL_FACTORS",
    "DATASET_FILES",
    "ReportSource",
    "Observation",
    "FactorParameter",
    "FactorTable",
    "CostSample",
    "EconomicConstants",
    "Dataset",
    "DatasetWarning",
    "load_dataset",
    "validate_dataset",
    "serialize_dataset",
    "save_dataset",
    "bundled_dataset_path",
    "load_bundled_dataset",
]

# The 11 cost factors supported by the estimator, in canonical order.
CANONICAL_FACTORS = (
    "Country",
    "Industry",
    "Supplier",
    "Number of Employees",
    "Cloud Model",
    "Employee Training",
    "Percentage of Remote Employees",
    "Cyber Insurance",
    "Multi-factor Authentication",
    "Identity Access Management",
    "Security Measures",
)

DATASET_FILES = ("reports.json", "factors.json", "samples.json", "constants.json")

_RATIO_RECOMPUTE_RTOL = 1e-12


@dataclass(frozen=True)
class ReportSource:
    """One industry report: publisher, data year, and overall sample average."""

    id: str
    publisher: str
    report_year: int
    avg_report_cost: float
    currency: str = "USD"
    region: str = ""

    def __post_init__(self):
        if not 2000 <= self.report_year <= 2100:
            raise DatasetError(f"report_year must lie in [2000, 2100], got {self.report_year}",
                               file="reports.json", field=f"{self.id}.report_year")
        if not self.avg_report_cost > 0:
            raise DatasetError(f"avg_report_cost must be positive, got {self.avg_report_cost}",
                               file="reports.json", field=f"{self.id}.avg_report_cost")


@dataclass(frozen=True)
class Observation:
    """One report measurement of a parameter's average cost.

    ``year`` is the calendar year the measurement represents (a report can
    publish several data years). ``ratio`` is the derived per-report
    relative deviation, and ``avg_factor``/``avg_report`` are the
    denominator inputs it was computed from.
    """

    report_id: str
    year: int
    cost_param: float
    ratio: float
    avg_factor: float
    avg_report: float


@dataclass(frozen=True)
class FactorParameter:
    """A concrete business characteristic within a factor, e.g. Banking."""

    name: str
    observations: tuple[Observation, ...]
    ratio: float
    estimated: bool = True


@dataclass(frozen=True)
class FactorTable:
    """All parameters of one cost factor."""

    factor: str
    parameters: tuple[FactorParameter, ...]

    def parameter(self, name: str) -> FactorParameter | None:
        for p in self.parameters:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class CostSample:
    """An ordered series of annualized per-company costs from one report."""

    report_id: str
    costs: tuple[float, ...]
    synthetic: bool = False
    fitted: FittedDistribution | None = None

    @property
    def n(self) -> int:
        return len(self.costs)


@dataclass(frozen=True)
class EconomicConstants:
    """Discount factors and the base-year cost-to-valuation conversion ratio."""

    discount_valuation: float
    discount_cost: float
    cv_ratio: float
    base_year: int

    def __post_init__(self):
        if not self.discount_valuation > 1:
            raise DatasetError(f"discount_valuation must exceed 1, got {self.discount_valuation}",
                               file="constants.json", field="discount_valuation")
        if not self.discount_cost > 1:
            raise DatasetError(f"discount_cost must exceed 1, got {self.discount_cost}",
                               file="constants.json", field="discount_cost")
        if not self.cv_ratio > 0:
            raise DatasetError(f"cv_ratio must be positive, got {self.cv_ratio}",
                               file="constants.json", field="cv_ratio")
        if not 2000 <= self.base_year <= 2100:
            raise DatasetError(f"base_year must lie in [2000, 2100], got {self.base_year}",
                               file="constants.json", field="base_year")


@dataclass(frozen=True)
class DatasetWarning:
    """A non-fatal data-quality observation."""

    code: str
    message: str


@dataclass(frozen=True)
class Dataset:
    """An immutable snapshot of the reference data all estimates run against."""

    reports: tuple[ReportSource, ...]
    factors: tuple[FactorTable, ...]
    samples: tuple[CostSample, ...]
    constants: EconomicConstants
    dataset_id: str = "dataset"
    checksum: str = field(default="", compare=False)
    path: str = field(default="", compare=False)

    def report(self, report_id: str) -> ReportSource:
        for r in self.reports:
            if r.id == report_id:
                return r
        raise KeyError(report_id)

    def factor(self, name: str) -> FactorTable:
        for f in self.factors:
            if f.factor == name:
                return f
        raise KeyError(name)

    @property
    def reference_sample(self) -> CostSample:
        return self.samples[0]

    def reference_fit(self) -> FittedDistribution:
        """The heavy-tailed fit backing CVaR extraction.

        Uses the fit frozen alongside the reference sample when present,
        otherwise refits the generalized inverse Gaussian family.
        """
        sample = self.reference_sample
        if sample.fitted is not None:
            return sample.fitted
        return fit(sample, DistributionFamily.GENINVGAUSS)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _read_json(path: Path, name: str):
    file_path = path / name
    if not file_path.is_file():
        raise DatasetError("missing file", file=str(file_path))
    try:
        with open(file_path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"malformed JSON: {exc}", file=name) from exc


def _check_keys(doc: dict, required: set[str], optional: set[str], file: str, where: str):
    if not isinstance(doc, dict):
        raise DatasetError(f"expected an object, got {type(doc).__name__}", file=file, field=where)
    unknown = set(doc) - required - optional
    if unknown:
        raise DatasetError(f"unknown key(s) {sorted(unknown)}", file=file, field=where)
    missing = required - set(doc)
    if missing:
        raise DatasetError(f"missing key(s) {sorted(missing)}", file=file, field=where)


def _positive_number(value, file: str, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise DatasetError(f"expected a finite number, got {value!r}", file=file, field=where)
    if value <= 0:
        raise DatasetError(f"non-positive cost {value}", file=file, field=where)
    return float(value)


def _load_reports(doc) -> tuple[ReportSource, ...]:
    if not isinstance(doc, list) or not doc:
        raise DatasetError("expected a non-empty list of report sources", file="reports.json")
    reports = []
    seen = set()
    for i, entry in enumerate(doc):
        where = f"[{i}]"
        _check_keys(entry, {"id", "publisher", "report_year", "avg_report_cost"},
                    {"currency", "region"}, "reports.json", where)
        if entry["id"] in seen:
            raise DatasetError(f"duplicate report id '{entry['id']}'", file="reports.json", field=where)
        seen.add(entry["id"])
        reports.append(ReportSource(
            id=str(entry["id"]),
            publisher=str(entry["publisher"]),
            report_year=int(entry["report_year"]),
            avg_report_cost=_positive_number(entry["avg_report_cost"], "reports.json",
                                             f"{where}.avg_report_cost"),
            currency=str(entry.get("currency", "USD")),
            region=str(entry.get("region", "")),
        ))
    return tuple(reports)


def _load_factors(doc, reports: dict[str, ReportSource]) -> tuple[FactorTable, ...]:
    if not isinstance(doc, list) or not doc:
        raise DatasetError("expected a non-empty list of factor tables", file="factors.json")
    tables = []
    seen = set()
    for i, entry in enumerate(doc):
        where = f"[{i}]"
        _check_keys(entry, {"factor", "parameters"}, set(), "factors.json", where)
        name = entry["factor"]
        if name not in CANONICAL_FACTORS:
            raise DatasetError(f"unknown factor name '{name}'", file="factors.json",
                               field=f"{where}.factor")
        if name in seen:
            raise DatasetError(f"duplicate factor '{name}'", file="factors.json", field=where)
        seen.add(name)
        if not isinstance(entry["parameters"], list) or not entry["parameters"]:
            raise DatasetError("factor must list at least one parameter", file="factors.json",
                               field=f"{name}.parameters")

        # raw observations first: group denominators are derived from them
        raw = {}
        for j, param in enumerate(entry["parameters"]):
            pwhere = f"{name}.parameters[{j}]"
            _check_keys(param, {"name", "observations", "ratio"}, {"estimated"},
                        "factors.json", pwhere)
            if not isinstance(param["observations"], list) or not param["observations"]:
                raise DatasetError("parameter needs at least one observation",
                                   file="factors.json", field=f"{pwhere}.observations")
            obs_list = []
            for k, obs in enumerate(param["observations"]):
                owhere = f"{pwhere}.observations[{k}]"
                _check_keys(obs, {"report", "cost_param"}, {"year"}, "factors.json", owhere)
                report_id = obs["report"]
                if report_id not in reports:
                    raise DatasetError(f"unknown report id '{report_id}'",
                                       file="factors.json", field=f"{owhere}.report")
                year = int(obs.get("year", reports[report_id].report_year))
                cost = _positive_number(obs["cost_param"], "factors.json", f"{owhere}.cost_param")
                if any(o[0] == report_id and o[1] == year for o in obs_list):
                    raise DatasetError(f"duplicate observation for report '{report_id}' year {year}",
                                       file="factors.json", field=owhere)
                obs_list.append((report_id, year, cost))
            raw[param["name"]] = (param, obs_list, f"{name}.parameters[{j}]")

        # per (report, year) group: the factor average is the mean cost over
        # all parameters observed in that group
        group_costs: dict[tuple[str, int], list[float]] = {}
        for _, obs_list, _ in raw.values():
            for report_id, year, cost in obs_list:
                group_costs.setdefault((report_id, year), []).append(cost)
        group_avg = {key: scalers.avg_factor(costs) for key, costs in group_costs.items()}

        parameters = []
        for pname, (param, obs_list, pwhere) in raw.items():
            observations = []
            triples = []
            for report_id, year, cost in obs_list:
                factor_average = group_avg[(report_id, year)]
                report_average = reports[report_id].avg_report_cost
                ratio = scalers.parameter_ratio([(cost, factor_average, report_average)])
                observations.append(Observation(
                    report_id=report_id, year=year, cost_param=cost,
                    ratio=ratio, avg_factor=factor_average, avg_report=report_average,
                ))
                triples.append((cost, factor_average, report_average))
            stored = param["ratio"]
            if not isinstance(stored, (int, float)) or isinstance(stored, bool):
                raise DatasetError(f"ratio must be a number, got {stored!r}",
                                   file="factors.json", field=f"{pwhere}.ratio")
            stored = float(stored)
            if stored <= -1.0:
                raise DatasetError(f"multiplier non-positive: ratio {stored} implies 1 + ratio <= 0",
                                   file="factors.json", field=f"{pwhere}.ratio")
            recomputed = scalers.parameter_ratio(triples)
            if abs(stored - recomputed) > _RATIO_RECOMPUTE_RTOL * max(1.0, abs(recomputed)):
                raise DatasetError(
                    f"stored ratio {stored!r} does not match the value recomputed from its "
                    f"observations ({recomputed!r})",
                    file="factors.json", field=f"{pwhere}.ratio")
            parameters.append(FactorParameter(
                name=str(pname),
                observations=tuple(observations),
                ratio=stored,
                estimated=bool(param.get("estimated", True)),
            ))
        tables.append(FactorTable(factor=name, parameters=tuple(parameters)))
    return tuple(tables)


def _load_samples(doc, reports: dict[str, ReportSource]) -> tuple[CostSample, ...]:
    if not isinstance(doc, list):
        raise DatasetError("expected a list of cost samples", file="samples.json")
    samples = []
    for i, entry in enumerate(doc):
        where = f"[{i}]"
        _check_keys(entry, {"report", "costs"}, {"synthetic", "fitted"}, "samples.json", where)
        if entry["report"] not in reports:
            raise DatasetError(f"unknown report id '{entry['report']}'",
                               file="samples.json", field=f"{where}.report")
        costs = entry["costs"]
        if not isinstance(costs, list) or not costs:
            raise DatasetError("costs must be a non-empty list", file="samples.json",
                               field=f"{where}.costs")
        values = tuple(
            _positive_number(c, "samples.json", f"{where}.costs[{k}]") for k, c in enumerate(costs)
        )
        fitted = None
        if "fitted" in entry:
            try:
                fitted = FittedDistribution.from_dict(entry["fitted"])
            except (KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"invalid fitted distribution: {exc}", file="samples.json",
                                   field=f"{where}.fitted") from exc
        samples.append(CostSample(
            report_id=str(entry["report"]),
            costs=values,
            synthetic=bool(entry.get("synthetic", False)),
            fitted=fitted,
        ))
    return tuple(samples)


def _load_constants(doc) -> tuple[EconomicConstants, str | None]:
    _check_keys(doc, {"discount_valuation", "discount_cost", "cv_ratio", "base_year"},
                {"dataset_id"}, "constants.json", "constants")
    constants = EconomicConstants(
        discount_valuation=float(doc["discount_valuation"]),
        discount_cost=float(doc["discount_cost"]),
        cv_ratio=float(doc["cv_ratio"]),
        base_year=int(doc["base_year"]),
    )
    return constants, doc.get("dataset_id")


def _checksum(path: Path) -> str:
    digest = hashlib.sha256()
    for name in DATASET_FILES:
        digest.update((path / name).read_bytes())
    return digest.hexdigest()


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset directory.

    Raises :class:`DatasetError` naming the offending file and field for
    missing files, schema violations, unknown factor names, or
    non-positive costs. Loading is deterministic: identical bytes produce
    an identical in-memory dataset.
    """
    path = Path(path)
    if not path.is_dir():
        raise DatasetError("missing file", file=str(path))
    reports = _load_reports(_read_json(path, "reports.json"))
    report_map = {r.id: r for r in reports}
    factors = _load_factors(_read_json(path, "factors.json"), report_map)
    samples = _load_samples(_read_json(path, "samples.json"), report_map)
    constants, dataset_id = _load_constants(_read_json(path, "constants.json"))
    return Dataset(
        reports=reports,
        factors=factors,
        samples=samples,
        constants=constants,
        dataset_id=dataset_id or path.name,
        checksum=_checksum(path),
        path=str(path),
    )


# ---------------------------------------------------------------------------
# Validation (non-fatal warnings)
# ---------------------------------------------------------------------------

def validate_dataset(dataset: Dataset) -> list[DatasetWarning]:
    """Report non-fatal data-quality issues on a loaded dataset.

    Flags factors backed by a single report source, parameters absent from
    report editions that cover the rest of their factor, and cost samples
    too short for distribution fitting.
    """
    warnings = []
    for table in dataset.factors:
        sources = {obs.report_id for p in table.parameters for obs in p.observations}
        if len(sources) == 1:
            warnings.append(DatasetWarning(
                code="single-source-factor",
                message=f"factor '{table.factor}' relies on a single report source "
                        f"({next(iter(sources))})",
            ))
        groups = {(obs.report_id, obs.year) for p in table.parameters for obs in p.observations}
        if len(groups) > 1:
            for p in table.parameters:
                covered = {(obs.report_id, obs.year) for obs in p.observations}
                for report_id, year in sorted(groups - covered):
                    warnings.append(DatasetWarning(
                        code="partial-coverage",
                        message=f"parameter '{p.name}' of factor '{table.factor}' has no "
                                f"observation in report '{report_id}' year {year}",
                    ))
    for sample in dataset.samples:
        if sample.n < MIN_FIT_SAMPLE:
            warnings.append(DatasetWarning(
                code="sample-below-threshold",
                message=f"cost sample '{sample.report_id}' has n={sample.n}, below the "
                        f"fitting threshold of {MIN_FIT_SAMPLE}",
            ))
    return warnings


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_dataset(dataset: Dataset) -> dict[str, object]:
    """Render a dataset back to its canonical four-file JSON form."""
    report_years = {r.id: r.report_year for r in dataset.reports}
    reports_doc = [
        {
            "id": r.id,
            "publisher": r.publisher,
            "report_year": r.report_year,
            "avg_report_cost": r.avg_report_cost,
            "currency": r.currency,
            "region": r.region,
        }
        for r in dataset.reports
    ]
    factors_doc = []
    for table in dataset.factors:
        parameters = []
        for p in table.parameters:
            observations = []
            for obs in p.observations:
                doc = {"report": obs.report_id, "cost_param": obs.cost_param}
                if obs.year != report_years[obs.report_id]:
                    doc["year"] = obs.year
                observations.append(doc)
            parameters.append({
                "name": p.name,
                "observations": observations,
                "ratio": p.ratio,
                "estimated": p.estimated,
            })
        factors_doc.append({"factor": table.factor, "parameters": parameters})
    samples_doc = []
    for sample in dataset.samples:
        doc = {"report": sample.report_id, "synthetic": sample.synthetic,
               "costs": list(sample.costs)}
        if sample.fitted is not None:
            doc["fitted"] = sample.fitted.to_dict()
        samples_doc.append(doc)
    constants_doc = {
        "dataset_id": dataset.dataset_id,
        "base_year": dataset.constants.base_year,
        "cv_ratio": dataset.constants.cv_ratio,
        "discount_valuation": dataset.constants.discount_valuation,
        "discount_cost": dataset.constants.discount_cost,
    }
    return {
        "reports.json": reports_doc,
        "factors.json": factors_doc,
        "samples.json": samples_doc,
        "constants.json": constants_doc,
    }


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset directory in canonical form."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for name, doc in serialize_dataset(dataset).items():
        with open(path / name, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=2)
            handle.write("\n")


def bundled_dataset_path() -> Path:
    """Location of the reference dataset shipped with the package."""
    return Path(__file__).parent / "data"


def load_bundled_dataset() -> Dataset:
    return load_dataset(bundled_dataset_path())

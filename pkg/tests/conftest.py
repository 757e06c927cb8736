import numpy as np
import pytest
from scipy import integrate

from rcvar.dataset import (
    Dataset,
    EconomicConstants,
    FactorParameter,
    FactorTable,
    Observation,
    ReportSource,
    load_bundled_dataset,
)
from rcvar.distribution import fit_all


@pytest.fixture(scope="session")
def dataset():
    return load_bundled_dataset()


@pytest.fixture(scope="session")
def reference_fit(dataset):
    return dataset.reference_fit()


@pytest.fixture(scope="session")
def bundled_fits(dataset):
    """All five families fitted to the bundled reference sample, best first."""
    return fit_all(dataset.reference_sample.costs)


@pytest.fixture(scope="session")
def client(dataset):
    from fastapi.testclient import TestClient

    from rcvar.service import create_app

    return TestClient(create_app(dataset))


def integrate_pdf(dist):
    """Quadrature oracle for the total probability mass of a density.

    Splits the axis at parameter-derived hint points so narrow peaks far
    from the origin are not skipped by the infinite-interval transform.
    """
    from rcvar.distribution import pdf

    hints = [dist.loc + dist.scale * z for z in (-5.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0, 20.0)]
    points = [-np.inf, *sorted(hints), np.inf]
    total = 0.0
    for lo, hi in zip(points, points[1:]):
        piece, _ = integrate.quad(lambda x: pdf(x, dist), lo, hi, limit=200)
        total += piece
    return total


def make_parameter(name, ratio, report_id="r1", year=2017, avg_factor=10e6, avg_report=10e6):
    cost = avg_factor + ratio * avg_report
    return FactorParameter(
        name=name,
        observations=(Observation(report_id=report_id, year=year, cost_param=cost,
                                  ratio=ratio, avg_factor=avg_factor, avg_report=avg_report),),
        ratio=ratio,
        estimated=True,
    )


def make_dataset(factor_ratios: dict[str, dict[str, float]]) -> Dataset:
    """An in-memory dataset with exactly the given factor -> {param: ratio} tables."""
    report = ReportSource(id="r1", publisher="Test", report_year=2017,
                          avg_report_cost=10e6, region="Global")
    factors = tuple(
        FactorTable(factor=fname, parameters=tuple(
            make_parameter(pname, ratio) for pname, ratio in params.items()))
        for fname, params in factor_ratios.items()
    )
    return Dataset(
        reports=(report,),
        factors=factors,
        samples=(),
        constants=EconomicConstants(discount_valuation=1.018, discount_cost=1.096,
                                    cv_ratio=6.763e-4, base_year=2017),
        dataset_id="test",
    )

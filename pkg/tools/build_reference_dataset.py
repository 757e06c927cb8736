#!/usr/bin/env python3
"""Build the bundled reference dataset under src/rcvar/data.

The factor tables are anchored to the handful of values the source reports
state outright (the 2017 banking cost and industry average, the per-year
banking and United States deviations); every other parameter is a plausible
estimate and is flagged ``estimated: true``. Per (report, year) group the
target deviations sum to zero, so the group's factor average recomputes
exactly from the stored per-parameter costs.

The reference cost sample is synthetic: a seeded heavy-tailed draw selected
so that the fitted generalized inverse Gaussian keeps the documented
CVaR-to-mean ratio at 95% confidence, the extreme-value share, and the
histogram peak location, and so that the five-family goodness-of-fit
ranking puts the generalized inverse Gaussian first and the normal last.

Run from the repository root:  python tools/build_reference_dataset.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from rcvar import scalers
from rcvar.dataset import load_dataset, save_dataset
from rcvar.distribution import DistributionFamily, fit, mean, quantile

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "rcvar" / "data"

TARGET_CVAR_RATIO = 23448 / 8000  # CVaR at 95% over expected cost
SAMPLE_N = 254
SAMPLE_MEAN = 11_700_000.0

REPORTS = [
    {"id": "acc2017", "publisher": "Accenture", "report_year": 2017,
     "avg_report_cost": 11_700_000, "currency": "USD", "region": "Global"},
    {"id": "acc2019", "publisher": "Accenture", "report_year": 2018,
     "avg_report_cost": 13_000_000, "currency": "USD", "region": "Global"},
    {"id": "ibm2022", "publisher": "IBM", "report_year": 2022,
     "avg_report_cost": 4_350_000, "currency": "USD", "region": "Global"},
]

REPORT_AVG = {r["id"]: float(r["avg_report_cost"]) for r in REPORTS}
REPORT_YEAR = {r["id"]: r["report_year"] for r in REPORTS}

# groups are (report id, data year); factor averages are per group
G17 = ("acc2017", 2017)
G18 = ("acc2019", 2018)
G21 = ("ibm2022", 2021)
G22 = ("ibm2022", 2022)

# mean parameter cost per factor and group
FACTOR_AVG = {
    ("Industry", G17): 10_348_000.0,
    ("Industry", G18): 11_520_000.0,
    ("Industry", G21): 4_066_000.0,
    ("Industry", G22): 4_143_000.0,
    ("Country", G17): 9_900_000.0,
    ("Country", G18): 11_050_000.0,
    ("Country", G21): 3_980_000.0,
    ("Country", G22): 4_020_000.0,
    ("Supplier", G22): 4_300_000.0,
    ("Number of Employees", G17): 10_500_000.0,
    ("Cloud Model", G21): 4_200_000.0,
    ("Employee Training", G22): 4_280_000.0,
    ("Percentage of Remote Employees", G21): 4_150_000.0,
    ("Percentage of Remote Employees", G22): 4_230_000.0,
    ("Cyber Insurance", G22): 4_310_000.0,
    ("Multi-factor Authentication", G22): 4_320_000.0,
    ("Identity Access Management", G22): 4_330_000.0,
    ("Security Measures", G17): 10_200_000.0,
    ("Security Measures", G18): 11_300_000.0,
    ("Security Measures", G22): 4_250_000.0,
}

BALANCE = "balance"          # parameter absorbs the residual so deviations sum to 0
COST = "cost"                # anchored absolute cost instead of a deviation

# factor -> parameter -> {group: deviation | (COST, value) | BALANCE}
# deviations are relative to the group's factor average, in units of the
# report's overall sample average
FACTORS: dict[str, dict[str, dict | str]] = {
    "Country": {
        "United States": {G17: 0.85, G18: 0.88, G21: 0.84, G22: 0.87},
        "Japan": {G17: 0.35, G18: 0.33, G21: 0.31, G22: 0.32},
        "Germany": {G17: 0.22, G18: 0.24, G21: 0.21, G22: 0.22},
        "United Kingdom": {G17: -0.08, G18: -0.06, G21: -0.07, G22: -0.06},
        "Canada": {G18: -0.12, G21: -0.13, G22: -0.12},
        "France": {G17: -0.30, G18: -0.28, G21: -0.29, G22: -0.27},
        "Italy": {G18: -0.35, G21: -0.34, G22: -0.33},
        "Brazil": {G17: -0.49, G18: -0.47, G21: -0.45, G22: -0.46},
        "Australia": {G17: BALANCE, G18: BALANCE, G21: BALANCE, G22: BALANCE},
    },
    "Industry": {
        "Banking": {G17: (COST, 18_280_000.0), G18: 0.45, G21: 0.39, G22: 0.42},
        "Utilities": {G17: 0.42, G18: 0.40, G21: 0.35, G22: 0.37},
        "Aerospace and Defense": {G17: 0.26, G18: 0.25, G21: 0.22, G22: 0.24},
        "Technology": {G17: 0.17, G18: 0.18, G21: 0.16, G22: 0.17},
        "Capital Markets": {G17: 0.09, G18: 0.10, G21: 0.08, G22: 0.09},
        "Health Care": {G17: 0.03, G18: 0.04, G21: 0.05, G22: 0.06},
        "Energy": {G17: -0.04, G18: -0.03, G21: -0.02, G22: -0.03},
        "Industrial and Manufacturing": {G17: -0.09, G18: -0.08, G21: -0.07, G22: -0.08},
        "Services": {G17: -0.13, G18: -0.12, G21: -0.11, G22: -0.12},
        "Communications and Media": {G17: -0.155, G18: -0.15, G21: -0.14, G22: -0.145},
        "Consumer Goods": {G17: -0.165, G18: -0.16, G21: -0.15, G22: -0.155},
        "Retail": {G17: -0.19, G18: -0.18, G21: -0.17, G22: -0.18},
        "Life Sciences": {G17: -0.22, G18: -0.21, G21: -0.20, G22: -0.21},
        "Travel": {G17: -0.26, G18: -0.25, G21: 0.05, G22: -0.24},
        "Public Sector": {G17: BALANCE, G18: BALANCE, G21: BALANCE, G22: BALANCE},
    },
    "Supplier": {
        "Third-party Compromise": {G22: 0.115},
        "No Third-party Involvement": {G22: BALANCE},
    },
    "Number of Employees": {
        "1,050 to 5,000": {G17: -0.31},
        "5,001 to 10,000": {G17: -0.09},
        "10,001 to 25,000": {G17: 0.11},
        "More than 25,000": {G17: BALANCE},
    },
    "Cloud Model": {
        "Public Cloud": {G21: 0.13},
        "Private Cloud": {G21: 0.04},
        "On Premises": {G21: -0.01},
        "Hybrid Cloud": {G21: BALANCE},
    },
    "Employee Training": {
        "Not Provided": {G22: 0.065},
        "Provided": {G22: BALANCE},
    },
    "Percentage of Remote Employees": {
        "Under 20%": {G21: -0.09, G22: -0.085},
        "20% to 50%": {G21: -0.02, G22: -0.02},
        "50% to 80%": {G21: 0.03, G22: 0.025},
        "Over 80%": {G21: BALANCE, G22: BALANCE},
    },
    "Cyber Insurance": {
        "Not Insured": {G22: 0.055},
        "Insured": {G22: BALANCE},
    },
    "Multi-factor Authentication": {
        "Not Deployed": {G22: 0.08},
        "Deployed": {G22: BALANCE},
    },
    "Identity Access Management": {
        "Not Deployed": {G22: 0.075},
        "Deployed": {G22: BALANCE},
    },
    "Security Measures": {
        "Security Intelligence and Threat Sharing": {G17: -0.14, G18: -0.15, G22: -0.145},
        "Advanced Identity and Access Governance": {G17: -0.10, G18: -0.105, G22: -0.10},
        "Automation and Machine Learning": {G17: -0.085, G18: -0.09, G22: -0.095},
        "Extensive Use of Cyber Analytics": {G17: -0.055, G18: -0.06, G22: -0.06},
        "Basic Controls Only": {G17: BALANCE, G18: BALANCE, G22: BALANCE},
    },
}

# only the report-stated anchors are non-estimates
VERBATIM = {("Industry", "Banking"), ("Country", "United States")}

CONSTANTS = {
    "dataset_id": "reference-2017",
    "base_year": 2017,
    "cv_ratio": 6.763e-4,
    "discount_valuation": 1.018,
    "discount_cost": 1.096,
}


def build_factor_docs() -> list[dict]:
    docs = []
    for factor_name, params in FACTORS.items():
        # resolve per-group deviations, filling the balancing parameter
        groups: dict[tuple, dict[str, float]] = {}
        for pname, spec in params.items():
            for group, target in spec.items():
                groups.setdefault(group, {})[pname] = target
        resolved: dict[tuple, dict[str, float]] = {}
        for group, targets in groups.items():
            avg = FACTOR_AVG[(factor_name, group)]
            report_avg = REPORT_AVG[group[0]]
            rho = {}
            balance_name = None
            for pname, target in targets.items():
                if target == BALANCE:
                    balance_name = pname
                elif isinstance(target, tuple) and target[0] == COST:
                    rho[pname] = (target[1] - avg) / report_avg
                else:
                    rho[pname] = float(target)
            if balance_name is not None:
                rho[balance_name] = -sum(rho.values())
            resolved[group] = rho

        parameters = []
        for pname, spec in params.items():
            observations = []
            triples = []
            for group in spec:
                avg = FACTOR_AVG[(factor_name, group)]
                report_id, year = group
                report_avg = REPORT_AVG[report_id]
                cost = round(avg + resolved[group][pname] * report_avg, 2)
                obs = {"report": report_id, "cost_param": cost}
                if year != REPORT_YEAR[report_id]:
                    obs["year"] = year
                observations.append(obs)
            parameters.append({"name": pname, "observations": observations})
        docs.append({"factor": factor_name, "parameters": parameters})
    return docs


def recompute_ratios(docs: list[dict]) -> None:
    """Fill each parameter's ratio from its observations, mirroring the loader."""
    for doc in docs:
        group_costs: dict[tuple, list[float]] = {}
        for param in doc["parameters"]:
            for obs in param["observations"]:
                year = obs.get("year", REPORT_YEAR[obs["report"]])
                group_costs.setdefault((obs["report"], year), []).append(obs["cost_param"])
        group_avg = {g: scalers.avg_factor(costs) for g, costs in group_costs.items()}
        for param in doc["parameters"]:
            triples = []
            for obs in param["observations"]:
                year = obs.get("year", REPORT_YEAR[obs["report"]])
                triples.append((obs["cost_param"], group_avg[(obs["report"], year)],
                                REPORT_AVG[obs["report"]]))
            param["ratio"] = scalers.parameter_ratio(triples)
            param["estimated"] = (doc["factor"], param["name"]) not in VERBATIM


def draw_sample(seed: int, p: float, b: float, lam: float) -> np.ndarray:
    x = stats.geninvgauss(p, b, loc=lam, scale=1.0).rvs(SAMPLE_N, random_state=seed)
    x = x * (SAMPLE_MEAN / x.mean())
    return np.round(x, 2)


def evaluate_sample(x: np.ndarray) -> dict | None:
    fits = {}
    for family in DistributionFamily:
        try:
            fits[family] = fit(x, family)
        except Exception:
            return None
    gig = fits[DistributionFamily.GENINVGAUSS]
    ratio = quantile(0.95, gig) / mean(gig)
    pvals = {f.value: d.p_value for f, d in fits.items()}
    others = [v for k, v in pvals.items() if k not in ("geninvgauss", "norm")]
    tail = int(np.sum(x > 40e6))
    hist, edges = np.histogram(x, bins=30)
    peak = (edges[np.argmax(hist)] + edges[np.argmax(hist) + 1]) / 2
    ok = (
        2.89 <= ratio <= 2.975
        and 6 <= tail <= 8
        and 3e6 <= peak <= 7e6
        and pvals["geninvgauss"] > max(others)
        and pvals["norm"] < 1e-4
        and pvals["norm"] <= min(others)
    )
    return {
        "ok": ok, "ratio": ratio, "tail": tail, "peak": peak,
        "pvals": pvals, "gig": gig,
        "spread": sum(np.log10(max(v, 1e-300)) for v in others),
    }


def search_sample() -> tuple[np.ndarray, dict, int]:
    p, b = -0.25, 0.30
    d = stats.geninvgauss(p, b)
    lam = (d.ppf(0.95) - TARGET_CVAR_RATIO * d.mean()) / (TARGET_CVAR_RATIO - 1.0)
    best = None
    for seed in range(1, 301):
        x = draw_sample(seed, p, b, lam)
        result = evaluate_sample(x)
        if result is None or not result["ok"]:
            continue
        print(f"  candidate seed={seed} ratio={result['ratio']:.4f} tail={result['tail']} "
              f"peak={result['peak'] / 1e6:.2f}M spread={result['spread']:.2f} "
              f"pvals={ {k: float(f'{v:.3g}') for k, v in result['pvals'].items()} }")
        if best is None or result["spread"] > best[1]["spread"]:
            best = (x, result, seed)
    if best is None:
        raise SystemExit("no qualifying sample seed found")
    return best


def main() -> int:
    factors_doc = build_factor_docs()
    recompute_ratios(factors_doc)

    print("searching for a qualifying synthetic sample...")
    x, result, seed = search_sample()
    print(f"selected seed={seed} ratio={result['ratio']:.4f} tail={result['tail']}/{SAMPLE_N} "
          f"peak={result['peak'] / 1e6:.2f}M")
    gig = result["gig"]
    samples_doc = [{
        "report": "acc2017",
        "synthetic": True,
        "costs": [float(v) for v in x],
        "fitted": gig.to_dict(),
    }]

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, doc in (("reports.json", REPORTS), ("factors.json", factors_doc),
                      ("samples.json", samples_doc), ("constants.json", CONSTANTS)):
        with open(OUT_DIR / name, "w", encoding="utf-8") as handle:
            json.dump(doc, handle, indent=2)
            handle.write("\n")

    # canonicalize through the loader and verify stability
    dataset = load_dataset(OUT_DIR)
    save_dataset(dataset, OUT_DIR)
    dataset2 = load_dataset(OUT_DIR)
    assert dataset2 == dataset, "canonical form is not stable under reload"

    banking = dataset.factor("Industry").parameter("Banking")
    us = dataset.factor("Country").parameter("United States")
    print(f"banking ratio: {banking.ratio:.6f} (per-year "
          f"{[round(o.ratio, 4) for o in banking.observations]})")
    print(f"united states ratio: {us.ratio:.6f}")
    avg_2017 = np.mean([p.observations[0].cost_param
                        for p in dataset.factor("Industry").parameters
                        if p.observations[0].report_id == "acc2017"])
    print(f"2017 industry average: {avg_2017:,.2f}")

    frozen = dataset.reference_fit()
    from rcvar.distribution import scale_to_mean
    cvar_8000 = quantile(0.95, scale_to_mean(frozen, 8000.0))
    print(f"scaled CVaR at mean 8000: {cvar_8000:,.1f} (target 23,448 within 2%: "
          f"{abs(cvar_8000 - 23448) / 23448:.4%})")

    c = dataset.constants
    for valuation, target in ((168e6, 71997), (134e6, 57426)):
        est = (valuation / c.discount_valuation ** 5) * c.cv_ratio * c.discount_cost ** (2013 - 2017)
        print(f"valuation {valuation / 1e6:.0f}M -> {est:,.0f} (target {target:,}, "
              f"err {abs(est - target) / target:.3%})")
    print(f"dataset written to {OUT_DIR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

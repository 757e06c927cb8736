#!/usr/bin/env python3
"""Rank what-if security actions for a concrete company profile.

Every alternative parameter of the six actionable factors (cloud model,
training, insurance, MFA, identity management, security measures) is run
through the full estimation chain; only strictly cost-reducing switches
are returned, cheapest resulting cost first.
"""

from rcvar import CompanyProfile, estimate, load_bundled_dataset, recommend_action

dataset = load_bundled_dataset()

profile = CompanyProfile(
    valuation=250_000_000,
    valuation_year=2022,
    target_year=2024,
    selections={
        "Industry": "Banking",
        "Country": "United States",
        "Multi-factor Authentication": "Not Deployed",
        "Cloud Model": "Public Cloud",
    },
)

baseline = estimate(profile, dataset)
print(f"baseline expected cost ${baseline.expected_cost:,.0f} "
      f"(CVaR ${baseline.cvar:,.0f})")
print()

recommendations = recommend_action(profile, dataset)
print(f"{len(recommendations)} cost-reducing actions found:")
for i, rec in enumerate(recommendations, start=1):
    was = rec.current if rec.current is not None else "(unspecified)"
    print(f"{i:2d}. {rec.factor}: {was} -> {rec.parameter}")
    print(f"      new expected cost ${rec.new_expected_cost:,.0f} "
          f"(saves ${-rec.delta:,.0f}/year)")

best = recommendations[0]
applied = estimate(profile.with_selection(best.factor, best.parameter), dataset)
print()
print(f"applying the top action reproduces its prediction exactly: "
      f"${applied.expected_cost:,.0f}")

#!/usr/bin/env python3
"""Walk through the expected-cost estimation chain step by step.

A mid-sized company valued at $168M in 2022 asks: what did a typical year
of cyberattack losses cost a company like us back in 2013? The chain runs
valuation discounting -> size conversion -> cost capitalization -> factor
customization, and every multiplicative step is visible in the breakdown.
"""

from rcvar import CompanyProfile, estimate, load_bundled_dataset

dataset = load_bundled_dataset()

profile = CompanyProfile(
    valuation=168_000_000,
    valuation_year=2022,
    target_year=2013,
)

result = estimate(profile, dataset)

print("inputs")
print(f"  valuation        ${profile.valuation:,.0f} (stated for {profile.valuation_year})")
print(f"  target year      {profile.target_year}")
print(f"  dataset base     {dataset.constants.base_year}")
print()
print("multiplier chain")
running = profile.valuation
for step in result.breakdown:
    running *= step.multiplier
    print(f"  {step.step:28s} x {step.multiplier:.6f} -> ${running:,.2f}")
print()
print(f"expected annualized cost  ${result.expected_cost:,.0f}")
print(f"CVaR at {result.confidence:.0%} confidence   ${result.cvar:,.0f}")
print(f"CVaR / expected ratio     {result.cvar / result.expected_cost:.3f}")

# the same company, now selecting business characteristics: a US bank
banked = estimate(
    CompanyProfile(
        valuation=168_000_000,
        valuation_year=2022,
        target_year=2013,
        selections={"Country": "United States", "Industry": "Banking"},
    ),
    dataset,
)
print()
print("with Country=United States and Industry=Banking selected:")
print(f"expected annualized cost  ${banked.expected_cost:,.0f} "
      f"({banked.expected_cost / result.expected_cost:.2f}x the unspecified profile)")

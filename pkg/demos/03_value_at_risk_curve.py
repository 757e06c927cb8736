#!/usr/bin/env python3
"""Rescale the fitted cost distribution and read the value-at-risk quantile.

The fitted heavy-tailed distribution is linearly rescaled so its mean
matches a company's expected cost; the CVaR is then the chosen confidence
quantile of that curve. Because the rescaling is linear, the CVaR-to-mean
ratio is one constant of the dataset, whatever the company size.

Writes cvar_density.png when matplotlib is available.
"""

import numpy as np

from rcvar import load_bundled_dataset, mean, pdf, quantile, scale_to_mean

dataset = load_bundled_dataset()
fitted = dataset.reference_fit()

expected_cost = 8_000.0
confidence = 0.95
scaled = scale_to_mean(fitted, expected_cost)
cvar = quantile(confidence, scaled)

print(f"expected cost ${expected_cost:,.0f} -> CVaR at {confidence:.0%}: ${cvar:,.0f}")
print(f"ratio: {cvar / expected_cost:.3f}")
print()
print("the ratio is invariant across company sizes:")
for target in (1_000.0, 80_000.0, 2_500_000.0, 1e9):
    s = scale_to_mean(fitted, target)
    print(f"  mean ${target:>13,.0f}  CVaR ${quantile(confidence, s):>15,.0f}  "
          f"ratio {quantile(confidence, s) / mean(s):.6f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the density plot")
else:
    xs = np.linspace(scaled.loc, quantile(0.999, scaled), 400)
    ys = [pdf(float(x), scaled) for x in xs]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, ys, color="black", lw=1.5)
    ax.fill_between(xs, ys, where=xs <= cvar, alpha=0.35, color="green",
                    label=f"within CVaR ({confidence:.0%})")
    ax.fill_between(xs, ys, where=xs >= cvar, alpha=0.35, color="steelblue",
                    label="tail beyond CVaR")
    ax.axvline(cvar, color="darkred", ls="--", lw=1, label=f"CVaR ${cvar:,.0f}")
    ax.set_xlabel("annualized cost (USD)")
    ax.set_ylabel("density")
    ax.set_title(f"Cost distribution scaled to mean ${expected_cost:,.0f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig("cvar_density.png", dpi=120)
    print("\nwrote cvar_density.png")

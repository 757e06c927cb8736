"""Command-line entry point.

Subcommands: ``estimate`` (expected cost + CVaR for a company profile),
``fit`` (distribution fitting report for a cost sample file), ``factors``
(the factor catalog), ``discount`` (growth-rate regression on a value
series), and ``serve`` (the HTTP service).

Exit codes: 0 success, 1 environment/runtime failure, 2 user-input error.
Human output rounds currency to whole USD; ``--json`` output never rounds
and matches the HTTP API documents.
"""

from __future__ import annotations

import json
import signal
import socket
import sys
from pathlib import Path

import click

from . import __version__
from .dataset import Dataset, bundled_dataset_path, load_dataset
from .distribution import DistributionFamily, fit_all
from .errors import DatasetError, FitError, RcvarError
from .estimator import CompanyProfile, estimate
from .scalers import fit_discount_factor

_DATASET_HELP = "Dataset directory (default: $RCVAR_DATASET or the bundled reference data)."


def _load(dataset_path: str | None) -> Dataset:
    path = Path(dataset_path) if dataset_path else bundled_dataset_path()
    try:
        return load_dataset(path)
    except DatasetError as exc:
        raise click.UsageError(f"--dataset: {exc}") from exc


def _money(value: float) -> str:
    return f"${value:,.0f}"


@click.group()
@click.version_option(__version__, prog_name="rcvar")
def main():
    """Cyber-risk cost and value-at-risk estimation."""


@main.command(name="estimate")
@click.option("--valuation", type=float, required=True, help="Company valuation (USD).")
@click.option("--valuation-year", type=int, required=True, help="Year the valuation is stated for.")
@click.option("--target-year", type=int, required=True, help="Year the estimate is produced for.")
@click.option("--factor", "factor_pairs", multiple=True, metavar="NAME=PARAM",
              help="Factor selection, repeatable (e.g. --factor Industry=Banking).")
@click.option("--confidence", type=float, default=0.95, show_default=True,
              help="CVaR confidence level, in (0.5, 1).")
@click.option("--json", "as_json", is_flag=True, help="Emit the full-precision JSON document.")
@click.option("--dataset", "dataset_path", envvar="RCVAR_DATASET", help=_DATASET_HELP)
def estimate_command(valuation, valuation_year, target_year, factor_pairs, confidence,
                     as_json, dataset_path):
    """Estimate expected annualized cost and CVaR for a company profile."""
    selections = {}
    for pair in factor_pairs:
        name, sep, parameter = pair.partition("=")
        if not sep or not name or not parameter:
            raise click.UsageError(f"--factor: expected NAME=PARAM, got '{pair}'")
        selections[name] = parameter
    dataset = _load(dataset_path)
    try:
        profile = CompanyProfile(
            valuation=valuation,
            valuation_year=valuation_year,
            target_year=target_year,
            selections=selections,
            confidence=confidence,
        )
        result = estimate(profile, dataset)
    except RcvarError as exc:
        flag = "--factor" if "factor" in str(exc) or "parameter" in str(exc) else (
            "--confidence" if "confidence" in str(exc) else
            "--valuation-year" if "valuation_year" in str(exc) else "--valuation")
        raise click.UsageError(f"{flag}: {exc}") from exc

    if as_json:
        click.echo(json.dumps(result.to_dict()))
        return
    click.echo(f"Expected annualized cost: {_money(result.expected_cost)}")
    click.echo(f"CVaR ({result.confidence:.0%} confidence):  {_money(result.cvar)}")
    click.echo("Breakdown:")
    running = profile.valuation
    click.echo(f"  {'valuation':38s} {'':>12s}  {_money(running)}")
    for step in result.breakdown:
        running *= step.multiplier
        click.echo(f"  {step.step:38s} x {step.multiplier:<10.6f}  {_money(running)}")


def _read_sample_file(path: str) -> list[float]:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise click.UsageError(f"--sample: cannot read '{path}': {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--sample: malformed JSON in '{path}': {exc}") from exc
    if isinstance(doc, dict):
        costs = doc.get("costs")
    elif isinstance(doc, list) and doc and isinstance(doc[0], dict):
        costs = doc[0].get("costs")
    else:
        costs = doc
    if not isinstance(costs, list) or not all(isinstance(v, (int, float)) for v in costs):
        raise click.UsageError(f"--sample: '{path}' does not contain a list of costs")
    return [float(v) for v in costs]


@main.command(name="fit")
@click.option("--sample", "sample_path", required=True, type=str,
              help="JSON cost sample: a samples.json entry or a bare list of costs.")
@click.option("--family", default="all", show_default=True,
              help="Family name (e.g. geninvgauss, Norm) or 'all'.")
@click.option("--dataset", "dataset_path", envvar="RCVAR_DATASET", help=_DATASET_HELP)
def fit_command(sample_path, family, dataset_path):
    """Fit candidate distribution families to a cost sample."""
    costs = _read_sample_file(sample_path)
    if family.strip().lower() == "all":
        families = list(DistributionFamily)
    else:
        try:
            families = [DistributionFamily.from_name(family)]
        except RcvarError as exc:
            raise click.UsageError(f"--family: {exc}") from exc
    try:
        results = fit_all(costs, families)
    except FitError as exc:
        raise click.UsageError(f"--sample: {exc}") from exc
    click.echo(f"{'family':15s} {'parameters':42s} {'KS':>8s} {'p-value':>10s}")
    for dist in results:
        params = ", ".join(
            [f"{v:.5g}" for v in dist.shape] + [f"loc={dist.loc:.5g}", f"scale={dist.scale:.5g}"])
        click.echo(f"{dist.family.value:15s} {params:42s} {dist.ks_statistic:8.4f} "
                   f"{dist.p_value:10.4g}")


@main.command(name="factors")
@click.option("--json", "as_json", is_flag=True, help="Emit the API catalog document.")
@click.option("--dataset", "dataset_path", envvar="RCVAR_DATASET", help=_DATASET_HELP)
def factors_command(as_json, dataset_path):
    """Print the factor catalog: parameters, ratios, and sources."""
    dataset = _load(dataset_path)
    catalog = {
        "factors": [
            {
                "factor": table.factor,
                "parameters": [
                    {
                        "name": p.name,
                        "ratio": p.ratio,
                        "estimated": p.estimated,
                        "sources": sorted({obs.report_id for obs in p.observations}),
                        "years": sorted({obs.year for obs in p.observations}),
                    }
                    for p in table.parameters
                ],
            }
            for table in dataset.factors
        ]
    }
    if as_json:
        click.echo(json.dumps(catalog))
        return
    for entry in catalog["factors"]:
        click.echo(entry["factor"])
        for p in entry["parameters"]:
            flag = " (estimated)" if p["estimated"] else ""
            years = ", ".join(str(y) for y in p["years"])
            click.echo(f"  {p['name']:42s} {p['ratio']:+8.4f}{flag}  [{years}]")


@main.command(name="discount")
@click.option("--series", "series_path", required=True, type=str,
              help="JSON series of {year, value} points (or a {'series': [...]} wrapper).")
def discount_command(series_path):
    """Fit an annual growth rate to a cumulative value series."""
    try:
        with open(series_path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise click.UsageError(f"--series: cannot read '{series_path}': {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--series: malformed JSON: {exc}") from exc
    points = doc.get("series") if isinstance(doc, dict) else doc
    try:
        series = [(int(p["year"]), float(p["value"])) for p in points]
    except (TypeError, KeyError) as exc:
        raise click.UsageError("--series: expected a list of {year, value} objects") from exc
    try:
        result = fit_discount_factor(series)
    except ValueError as exc:
        raise click.UsageError(f"--series: {exc}") from exc
    click.echo(f"annual growth rate: {result.beta:.6f}")
    click.echo(f"discount factor:    {result.discount_factor:.6f}")
    click.echo(f"r-squared:          {result.r_squared:.6f}")
    click.echo(f"points:             {result.n_points}")


@main.command(name="serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", "dataset_path", envvar="RCVAR_DATASET", help=_DATASET_HELP)
@click.option("--origin", "origins", multiple=True,
              help="Allowed cross-origin URL, repeatable (default: localhost only).")
def serve_command(port, host, dataset_path, origins):
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .service import create_app

    path = Path(dataset_path) if dataset_path else bundled_dataset_path()
    try:
        dataset = load_dataset(path)
    except DatasetError as exc:
        click.echo(f"error: dataset load failed: {exc}", err=True)
        sys.exit(1)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"error: cannot bind {host}:{port}: {exc.strerror}", err=True)
        sys.exit(1)
    finally:
        probe.close()

    app = create_app(dataset, origins=list(origins) or None)
    server = uvicorn.Server(uvicorn.Config(app, host=host, port=port, log_level="warning"))
    signal.signal(signal.SIGTERM, lambda *_: setattr(server, "should_exit", True))
    try:
        server.run()
    except KeyboardInterrupt:
        # re-raised by uvicorn after its graceful shutdown completes
        pass


if __name__ == "__main__":
    main()

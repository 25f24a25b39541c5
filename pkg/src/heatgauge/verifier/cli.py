"""Command line front end for the inequality suites.

Exit codes: 0 when every claim met its expectation (inconclusive rows
only produce a warning), 1 when any claim FAILed or any falsification
control did not, 2 for configuration problems, 3 for numerical
breakdowns inside an estimator.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..errors import ConfigError, NumericsError
from ..gamma_calculus import HEISENBERG_CD, check_cd
from ..geometry import get_geometry
from ..geometry.functions import catalog_functions
from ..reports import FAIL, INCONCLUSIVE, rows_to_csv, rows_to_json
from .suites import (
    SUITE_NAMES,
    ExperimentConfig,
    default_config,
    run_suite,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _build_configs(config_path, suites, seed):
    """Resolve CLI flags and an optional config file into run configs."""
    base = _load_config(config_path) if config_path else {}
    if seed is not None:
        base["seed"] = seed
    wanted = list(suites)
    if not wanted:
        wanted = [base["suite"]] if "suite" in base else list(SUITE_NAMES)
    configs = []
    for name in wanted:
        payload = dict(base)
        payload["suite"] = name
        if config_path or seed is not None:
            configs.append(ExperimentConfig.from_dict(payload))
        else:
            configs.append(default_config(name))
    return configs


def _run_configs(configs):
    rows = []
    for cfg in configs:
        rows.extend(run_suite(cfg))
    return rows


def _summarize(rows):
    """(exit code, number of inconclusive claim rows)."""
    bad = 0
    warned = 0
    for r in rows:
        if r.control:
            bad += r.verdict != FAIL
        elif r.verdict == FAIL:
            bad += 1
        elif r.verdict == INCONCLUSIVE:
            warned += 1
    return (EXIT_FAIL if bad else EXIT_OK), warned


def _handle(exc):
    if isinstance(exc, ConfigError):
        where = f" (field: {exc.field})" if exc.field else ""
        click.echo(f"config error{where}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if isinstance(exc, NumericsError):
        claim = exc.detail.get("claim")
        where = f" in {claim}" if claim else ""
        click.echo(f"numerics error{where}: {exc}", err=True)
        sys.exit(EXIT_NUMERICS)
    raise exc


@click.group()
def main():
    """Numerical verification of heat kernel measure inequalities."""


@main.command()
@click.option("--config", "config_path",
              type=click.Path(exists=False, dir_okay=False),
              help="JSON experiment description.")
@click.option("--seed", type=int, default=None,
              help="Override the run seed.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              help="Write report.json and rows.csv here instead of stdout.")
@click.option("--suite", "suites", multiple=True,
              type=click.Choice(SUITE_NAMES),
              help="Suite to run (repeatable); default is all suites.")
def run(config_path, seed, out_dir, suites):
    """Run verification suites and emit the report."""
    try:
        configs = _build_configs(config_path, suites, seed)
        rows = _run_configs(configs)
    except (ConfigError, NumericsError) as exc:
        _handle(exc)
    report = rows_to_json(rows, config=[c.as_dict() for c in configs])
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report + "\n")
        (out / "rows.csv").write_text(rows_to_csv(rows))
        click.echo(f"wrote {out / 'report.json'} and {out / 'rows.csv'}",
                   err=True)
    else:
        click.echo(report)
    code, warned = _summarize(rows)
    if warned:
        click.echo(f"warning: {warned} inconclusive claim(s)", err=True)
    sys.exit(code)


@main.command("cd-check")
@click.option("--function", "names", multiple=True,
              help="Catalog function to check (repeatable); default all "
                   "with a symbolic form.")
def cd_check(names):
    """Print curvature-dimension margins for catalog functions."""
    geom = get_geometry("heisenberg")
    funcs = []
    try:
        catalog = {f.name: f for f in catalog_functions(geom)}
        if names:
            for name in names:
                if name not in catalog:
                    raise ConfigError(f"unknown function {name!r}",
                                      field="function")
                funcs.append(catalog[name])
        else:
            funcs = [f for f in catalog.values() if f.poly is not None]
    except ConfigError as exc:
        _handle(exc)
    click.echo(f"{'function':<12} {'min margin':>14} {'nu':>6} "
               f"{'witness':<26} result")
    worst_bad = False
    for f in funcs:
        if f.poly is None:
            raise ConfigError(
                f"{f.name!r} has no symbolic form", field="function")
        res = check_cd(f.poly, HEISENBERG_CD)
        point = "(" + ", ".join(f"{v:.3g}" for v in res.witness_point) + ")"
        status = "PASS" if res.passed else "FAIL"
        worst_bad = worst_bad or not res.passed
        click.echo(f"{f.name:<12} {res.min_margin:>14.6g} "
                   f"{res.witness_nu:>6g} {point:<26} {status}")
    sys.exit(EXIT_FAIL if worst_bad else EXIT_OK)


@main.command("plot-data")
@click.option("--suite", "suite", required=True,
              type=click.Choice(SUITE_NAMES), help="Suite to tabulate.")
@click.option("--config", "config_path",
              type=click.Path(exists=False, dir_okay=False),
              help="JSON experiment description.")
@click.option("--seed", type=int, default=None,
              help="Override the run seed.")
def plot_data(suite, config_path, seed):
    """Emit (x, lhs, rhs) triples of a suite as CSV for plotting."""
    try:
        configs = _build_configs(config_path, (suite,), seed)
        rows = _run_configs(configs)
    except (ConfigError, NumericsError) as exc:
        _handle(exc)
    click.echo("claim,x,lhs,rhs")
    for r in rows:
        if r.x is None or r.control:
            continue
        click.echo(f"{r.claim},{r.x:g},{r.lhs:.12g},{r.rhs:.12g}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()

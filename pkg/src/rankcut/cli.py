"""Command-line front end.

Subcommands mirror the pipeline stages; every one takes ``--config PATH``.
Data goes to files only; logs go to standard error.  Exit codes: 0 on
success, 2 on configuration/validation errors, 1 on runtime errors.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import harness
from .errors import ConfigError, RankcutError

log = logging.getLogger("rankcut")


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _run(step):
    try:
        step()
    except ConfigError as exc:
        log.error("%s", exc)
        sys.exit(2)
    except RankcutError as exc:
        log.error("%s", exc)
        sys.exit(1)


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(), help="Experiment config JSON."
)


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """Re-ranking cut-off experiments: sweep, truncate, evaluate, report."""
    _configure_logging(verbose)


@main.command()
@config_option
def sweep(config_path: str):
    """Compute the per-query metric sweep cache."""
    _run(lambda: harness.cmd_sweep(harness.load_config(config_path)))


@main.command()
@config_option
def oracle(config_path: str):
    """Oracle cut-offs and their cumulative distribution."""
    _run(lambda: harness.cmd_oracle(harness.load_config(config_path)))


@main.command()
@config_option
def targets(config_path: str):
    """Trade-off target files for every configured preset."""
    _run(lambda: harness.cmd_targets(harness.load_config(config_path)))


@main.command()
@config_option
def features(config_path: str):
    """Per-item feature JSONL files for supervised truncators."""
    _run(lambda: harness.cmd_features(harness.load_config(config_path)))


@main.command()
@config_option
@click.option(
    "--method",
    required=True,
    type=click.Choice(["fixed_k", "greedy_k", "surprise"]),
    help="Truncation method.",
)
@click.option("--k", type=int, default=None, help="Cut-off for fixed_k.")
@click.option("--beta", type=float, default=None, help="Trade-off preset for greedy_k.")
def truncate(config_path: str, method: str, k: int | None, beta: float | None):
    """Run an unsupervised truncation method, writing a prediction file."""
    _run(
        lambda: harness.cmd_truncate(
            harness.load_config(config_path), method, k=k, beta=beta
        )
    )


@main.command()
@config_option
@click.argument("predictions", nargs=-1, required=True, type=click.Path(exists=True))
def evaluate(config_path: str, predictions: tuple[str, ...]):
    """Evaluate prediction files into the report table (CSV + text)."""
    _run(
        lambda: harness.cmd_evaluate(
            harness.load_config(config_path), [Path(p) for p in predictions]
        )
    )


@main.command()
@config_option
@click.argument("predictions", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--svg", is_flag=True, help="Also render a self-contained SVG scatter.")
def plotdata(config_path: str, predictions: tuple[str, ...], svg: bool):
    """Figure data: scatter points, fixed-k frontier, cut-off histograms."""
    _run(
        lambda: harness.cmd_plotdata(
            harness.load_config(config_path), [Path(p) for p in predictions], svg=svg
        )
    )


if __name__ == "__main__":
    main()

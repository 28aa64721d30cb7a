"""Command-line interface for priorlab."""

import logging
import sys
from contextlib import nullcontext
from typing import Callable, List, Optional, Tuple

import click
from colorama import Fore, Style, init
from pydantic import ValidationError

from priorlab import __version__
from priorlab.config import PriorLabConfig, RunConfig
from priorlab.core.models import Dataset, LikelihoodModel, model_from_label
from priorlab.core.numerics import SCHEMES
from priorlab.core.priors import MIXED, PRIOR_KINDS
from priorlab.core.runner import SUCCESSION_KINDS, PriorLabRunner
from priorlab.exceptions import PriorLabError
from priorlab.utils.data_io import read_dataset
from priorlab.utils.report_generator import ReportGenerator, human

# Initialize colorama for cross-platform colored output
init(autoreset=True)

RULE = "=" * 72


def _echo(message: str = "", color: str = "") -> None:
    click.echo(color + message, err=True)


def common_options(f: Callable) -> Callable:
    """Grid, output and seed flags shared by every computing command."""
    options = [
        click.option('--grid', 'grid_size', type=int, default=None, help='Grid nodes (default from config)'),
        click.option('--scheme', type=click.Choice(SCHEMES), default=None, help='Quadrature scheme'),
        click.option('--format', 'output_format', type=click.Choice(["json", "csv"]), default=None,
                     help='Machine output format'),
        click.option('--seed', type=int, default=None, help='Seed for all randomness'),
        click.option('--out', 'output_path', type=click.Path(dir_okay=False), default=None,
                     help='Write records here instead of stdout'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@click.group()
@click.version_option(version=__version__)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='YAML configuration file')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr')
@click.pass_context
def cli(ctx, config_path, verbose):
    """
    priorlab - noninformative priors, grid posteriors and information processing.

    Builds Laplace, Haldane, Jeffreys, MDIP and lump priors, computes grid
    posteriors and rule-of-succession tables, and checks that the Bayes
    posterior is the 100% efficient information processor.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = PriorLabConfig.from_yaml(config_path) if config_path else PriorLabConfig.create_default()
    except ValidationError as e:
        _echo(f"✗ Invalid configuration: {e}", Fore.RED)
        ctx.exit(2)


def _run(
    ctx,
    command: str,
    settings: dict,
    compute: Callable[[PriorLabConfig, RunConfig], List[dict]],
    title: str,
) -> None:
    """Validate the run, compute records, write them and exit with the right status."""
    config: PriorLabConfig = ctx.obj["config"]
    try:
        run_config = RunConfig(
            command=command,
            output_format=settings.pop("output_format") or config.output.format,
            **settings,
        )
    except ValidationError as e:
        message = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        ReportGenerator(config, sys.stdout, "json").write({"record": "error", "command": command, "message": message})
        _echo(f"✗ Error: {message}", Fore.RED)
        ctx.exit(2)

    _echo(RULE, Fore.CYAN)
    _echo(title, Fore.CYAN + Style.BRIGHT)
    _echo(RULE, Fore.CYAN)

    try:
        records = compute(config, run_config)
    except PriorLabError as e:
        records = [{"record": "error", "command": command, "message": str(e)}]

    target = open(run_config.output_path, "w", newline="") if run_config.output_path else nullcontext(sys.stdout)
    with target as stream:
        writer = ReportGenerator(config, stream, run_config.output_format)
        writer.write_all(records)

    _echo_summary(records, config.output.human_digits)
    if writer.errors_written:
        ctx.exit(1)
    _echo(f"✓ {command} complete ({writer.records_written} records)", Fore.GREEN)


def _echo_summary(records: List[dict], digits: int) -> None:
    for record in records:
        kind = record.get("record")
        if kind == "error":
            _echo(f"✗ Error: {record['message']}", Fore.RED)
        elif kind in ("summary", "efficiency", "ar1", "succession"):
            fields = ", ".join(f"{k}={human(v, digits)}" for k, v in record.items() if k != "record")
            _echo(f"  {kind}: {fields}")


def _load_data(
    data_path: Optional[str],
    model_label: Optional[str],
    successes: int,
    failures: int,
) -> Tuple[LikelihoodModel, Dataset]:
    if data_path:
        model, data = read_dataset(data_path)
        if model_label and model_label != model.label:
            raise PriorLabError(f"--model {model_label} disagrees with the dataset header {model.label}")
        return model, data
    model = model_from_label(model_label or "bernoulli")
    if model.label == "bernoulli":
        return model, Dataset.from_counts(successes, failures)
    return model, Dataset((), model.label)


def _warn_lumps(kinds, k0, k1, config: PriorLabConfig) -> None:
    if MIXED in kinds and (k0 is None or k1 is None):
        _echo(
            f"Warning: lump masses default to k0={config.lumps.k0:g}, k1={config.lumps.k1:g}; "
            "this is a demo convention, not a derived value",
            Fore.YELLOW,
        )


def data_options(f: Callable) -> Callable:
    options = [
        click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), default=None,
                     help='Dataset file (header "model: <label>")'),
        click.option('--successes', type=click.IntRange(min=0), default=1, show_default=True,
                     help='Bernoulli successes when no --data is given'),
        click.option('--failures', type=click.IntRange(min=0), default=0, show_default=True,
                     help='Bernoulli failures when no --data is given'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def lump_options(f: Callable) -> Callable:
    f = click.option('--k1', type=float, default=None, help='Mixed-prior mass at p = 1')(f)
    return click.option('--k0', type=float, default=None, help='Mixed-prior mass at p = 0')(f)


@cli.command()
@click.option('--model', 'model_label', default='bernoulli', show_default=True, help='Model label')
@click.option('--kind', 'prior_kind', type=click.Choice(PRIOR_KINDS), required=True, help='Prior kind')
@click.option('--normalize', 'normalize_prior', is_flag=True, help='Require a proper, normalized prior')
@click.option('--save', 'save_path', type=click.Path(dir_okay=False), default=None,
              help='Also write the prior record (label, domain, atoms, tabulated density) as JSON')
@lump_options
@common_options
@click.pass_context
def prior(ctx, model_label, prior_kind, normalize_prior, save_path, k0, k1, **settings):
    """
    Tabulate a prior: density samples, atoms, constant and endpoint limits.
    """
    _warn_lumps((prior_kind,), k0, k1, ctx.obj["config"])

    def compute(config, run):
        model = model_from_label(run.model_label)
        return PriorLabRunner(config).run_prior(
            model, run.prior_kind, run.grid_size, run.scheme, normalize_prior, k0, k1, save_path
        )

    settings.update(model_label=model_label, prior_kind=prior_kind)
    _run(ctx, "prior", _with_grid(settings, ctx), compute, f"Prior: {prior_kind} ({model_label})")


@cli.command()
@click.option('--model', 'model_label', default=None, help='Model label (default from the dataset header)')
@click.option('--kind', 'prior_kind', type=click.Choice(PRIOR_KINDS), default='uniform', show_default=True)
@data_options
@lump_options
@common_options
@click.pass_context
def posterior(ctx, model_label, prior_kind, data_path, successes, failures, k0, k1, **settings):
    """
    Grid posterior, posterior atoms and marginal likelihood.
    """
    _warn_lumps((prior_kind,), k0, k1, ctx.obj["config"])

    def compute(config, run):
        model, data = _load_data(data_path, model_label, successes, failures)
        return PriorLabRunner(config).run_posterior(
            model, data, run.prior_kind, run.grid_size, run.scheme, k0, k1
        )

    settings.update(model_label=model_label or "bernoulli", prior_kind=prior_kind)
    _run(ctx, "posterior", _with_grid(settings, ctx), compute, f"Posterior under {prior_kind}")


@cli.command()
@click.option('--n-max', 'n_max', type=click.IntRange(min=0), default=10, show_default=True,
              help='Largest number of trials')
@click.option('--kind', 'kinds', type=click.Choice(PRIOR_KINDS), multiple=True,
              help='Prior column (repeatable; default uniform, jeffreys, mdip, mixed, haldane)')
@click.option('--limit', is_flag=True, help='Use the Haldane limit convention instead of marking cells improper')
@lump_options
@common_options
@click.pass_context
def succession(ctx, n_max, kinds, limit, k0, k1, **settings):
    """
    Rule-of-succession table: P(success on trial n+1 | n successes in n trials).
    """
    kinds = tuple(kinds) or SUCCESSION_KINDS
    _warn_lumps(kinds, k0, k1, ctx.obj["config"])
    if limit and "haldane" in kinds:
        _echo("Warning: Haldane cells use the limit convention (1 for n >= 1, 1/2 for n = 0)", Fore.YELLOW)

    def compute(config, run):
        return PriorLabRunner(config).run_succession(n_max, kinds, run.grid_size, run.scheme, k0, k1, limit)

    settings.update(model_label="bernoulli")
    _run(ctx, "succession", _with_grid(settings, ctx), compute, f"Rule of succession, n = 0..{n_max}")


@cli.command()
@click.option('--model', 'model_label', default=None, help='Model label (default from the dataset header)')
@click.option('--kind', 'prior_kind', type=click.Choice(PRIOR_KINDS), default='uniform', show_default=True)
@click.option('--perturbations', type=click.IntRange(min=0), default=0, show_default=True,
              help='Random perturbed candidates to score')
@data_options
@common_options
@click.pass_context
def efficiency(ctx, model_label, prior_kind, perturbations, data_path, successes, failures, **settings):
    """
    Output minus input information for the posterior, the likelihood-only
    output and seeded random perturbations of the posterior.
    """
    def compute(config, run):
        model, data = _load_data(data_path, model_label, successes, failures)
        return PriorLabRunner(config).run_efficiency(
            model, data, run.prior_kind, perturbations, run.seed, run.grid_size, run.scheme
        )

    settings.update(model_label=model_label or "bernoulli", prior_kind=prior_kind)
    _run(ctx, "efficiency", _with_grid(settings, ctx), compute, f"Information processing under {prior_kind}")


@cli.command()
@click.option('--T', 'T', type=click.IntRange(min=2), default=None, help='Series length to simulate')
@click.option('--b', 'b', type=float, default=None, help='True AR(1) coefficient')
@click.option('--sigma', type=float, default=1.0, show_default=True, help='Known innovation scale')
@click.option('--data', 'data_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='AR(1) series file instead of simulation')
@click.option('--save-data', 'save_data', type=click.Path(dir_okay=False), default=None,
              help='Write the series used (simulated or read) as a dataset file')
@common_options
@click.pass_context
def ar1(ctx, T, b, sigma, data_path, save_data, **settings):
    """
    Compare the AR(1) MDIP and Jeffreys kernels: posteriors over b at a known
    sigma and kernel values near b = -1 and b = +1.
    """
    def compute(config, run):
        data = read_dataset(data_path)[1] if data_path else None
        return PriorLabRunner(config).run_ar1(
            T, b, sigma, run.seed, data, run.grid_size, run.scheme, save_data
        )

    settings.update(model_label="ar1")
    _run(ctx, "ar1", _with_grid(settings, ctx), compute, "AR(1) prior comparison")


@cli.command(name="init-config")
@click.option('--output', '-o', default='priorlab.yaml', show_default=True, help='Output config file path')
@click.pass_context
def init_config(ctx, output):
    """
    Write the default configuration as YAML.
    """
    PriorLabConfig.create_default().to_yaml(output)
    _echo(f"✓ Configuration saved to: {output}", Fore.GREEN)


def _with_grid(settings: dict, ctx) -> dict:
    if settings.get("grid_size") is None:
        settings["grid_size"] = ctx.obj["config"].numerics.grid_size
    return settings


if __name__ == "__main__":
    cli()

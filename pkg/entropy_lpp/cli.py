#! /usr/bin/env python
# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""
Command line interface for entropy-controlled last passage percolation.

One executable, ``elpp``, exposes the samplers, both solvers, the volume
checks, the replica experiments and the self test as subcommands.

Relies on one optional environment variable:

ELPP_THREADS    Default worker count for the ``exp`` subcommands. An
                explicit ``--threads`` flag takes precedence.

Exit codes: 0 on success, 1 on a contract violation (bad flags, bad
config, a failed strict check), 2 on an I/O or environment-format error.
Errors are reported as a single JSON line on stderr.
"""

import logging
import sys
from typing import Optional, Sequence

import arrow
import click
from halo import Halo
import numpy as np

from entropy_lpp.config import (
    OUTPUT_FORMATS,
    RunConfig,
    load_run_config,
)
from entropy_lpp.core import Box, CONTINUOUS, LATTICE
from entropy_lpp.environment import (
    FIELD_METHODS,
    KINDS,
    LATTICE_CLOUD,
    LATTICE_FIELD,
    MANUAL,
    SeedSpec,
    UNIFORM_CLOUD,
    sample_lattice_cloud,
    sample_lattice_field,
    sample_ppp_ordered,
    sample_uniform_cloud,
)
from entropy_lpp.errors import (
    ConfigError,
    ContractViolationError,
    EnvironmentFormatError,
    ExperimentCheckError,
)
from entropy_lpp.experiments import harness
from entropy_lpp.experiments.selftest import run_selftest
from entropy_lpp.services.serialization import SerializationService
from entropy_lpp.solvers.elpp import elpp_value, min_entropy_for_count
from entropy_lpp.solvers.variational import (
    beta_sweep,
    solve_tail,
    solve_variational,
)
from entropy_lpp.volume import count_lattice_body, volume_mc

LOG_FORMAT = (
    "[%(asctime)s] %(levelname)s - %(message)s {%(filename)s:%(lineno)d}"
)

logger = logging.getLogger("entropy_lpp")

# options that do not change what is computed; threads stays out so that
# output is identical for every worker count
_NON_PARAM_KEYS = ("output", "fmt", "threads")

_handler: Optional[logging.Handler] = None


def _configure_logging(verbose: bool) -> None:
    """Attach one stderr handler to the package logger, rebinding it to the
    current stderr on every invocation."""
    global _handler
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    if _handler is not None:
        logger.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(_handler)


def _resolve_command(ctx: click.Context, path: Sequence[str]) -> click.Command:
    command: click.Command = ctx.command
    for name in path:
        if not isinstance(command, click.Group):
            raise ConfigError(f"'{' '.join(path)}' is not a subcommand path")
        sub = command.get_command(ctx, name)
        if sub is None:
            raise ConfigError(f"unknown subcommand '{' '.join(path)}'")
        command = sub
    return command


def _nested_default_map(path: Sequence[str], values: dict) -> dict:
    nested = values
    for name in reversed(path):
        nested = {name: nested}
    return nested


def _apply_run_config(ctx: click.Context, run_config: RunConfig) -> None:
    """Turn a run config into click defaults for its subcommand, so explicit
    flags still win."""
    path = run_config.command_path()
    if not path:
        raise ConfigError("run config 'subcommand' is empty")
    if ctx.invoked_subcommand != path[0]:
        raise ConfigError(
            f"config is for '{run_config.subcommand}' but "
            f"'{ctx.invoked_subcommand}' was invoked"
        )
    command = _resolve_command(ctx, path)
    known = {p.name for p in command.params}
    defaults = run_config.flat_defaults()
    unknown = sorted(set(defaults) - known)
    if unknown:
        raise ConfigError(
            f"unknown parameters for '{run_config.subcommand}': {unknown}"
        )
    ctx.default_map = _nested_default_map(path, defaults)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    seed = int(
        np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0]
    )
    click.echo(f"generated seed: {seed}", err=True)
    logger.info("no --seed given, generated %d", seed)
    return seed


def _run_params(ctx: click.Context, **resolved) -> dict:
    params = {
        k: v for k, v in ctx.params.items() if k not in _NON_PARAM_KEYS
    }
    params.update(resolved)
    return {
        k: list(v) if isinstance(v, tuple) else v for k, v in params.items()
    }


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        SerializationService.write_text(text, output)
        logger.info("wrote %s", output)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _spinner(text: str) -> Halo:
    return Halo(
        text=text, spinner="dots", stream=sys.stderr,
        enabled=sys.stderr.isatty(),
    )


def seed_option(f):
    return click.option(
        "--seed",
        type=click.IntRange(0, 2**64 - 1),
        default=None,
        help="Master seed. Generated, printed to stderr and recorded when "
        "omitted.",
    )(f)


def output_options(default_format: str):
    def decorator(f):
        f = click.option(
            "--format",
            "fmt",
            type=click.Choice(OUTPUT_FORMATS),
            default=default_format,
            show_default=True,
            help="Output format.",
        )(f)
        return click.option(
            "--output",
            type=click.Path(dir_okay=False, writable=True),
            default=None,
            help="Output file. Defaults to stdout.",
        )(f)

    return decorator


def experiment_options(f):
    f = click.option(
        "--threads",
        type=click.IntRange(1),
        envvar="ELPP_THREADS",
        default=1,
        show_default=True,
        help="Worker processes. Defaults to $ELPP_THREADS when set. Output "
        "does not depend on it.",
    )(f)
    f = click.option(
        "--strict",
        is_flag=True,
        default=False,
        help="Fail with exit code 1 when a statistical check fails.",
    )(f)
    f = click.option(
        "--replicas",
        type=click.IntRange(1),
        required=True,
        help="Number of replicas.",
    )(f)
    return output_options("jsonl")(seed_option(f))


def env_option(f):
    return click.option(
        "--env",
        "env_path",
        type=click.Path(dir_okay=False),
        required=True,
        help="Environment JSON document, as written by 'elpp sample'.",
    )(f)


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="JSON run config with keys subcommand, params, master_seed, "
    "output and format. Flags given on the command line override it.",
)
@click.option("--verbose", is_flag=True, default=False, help="Debug logging.")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool):
    """Entropy-controlled last passage percolation: samplers, exact solvers,
    volume checks and replica experiments."""
    _configure_logging(verbose)
    if config_path:
        _apply_run_config(ctx, load_run_config(config_path))


@cli.command(name="sample")
@click.option(
    "--kind",
    type=click.Choice([k for k in KINDS if k != MANUAL]),
    required=True,
    help="Environment kind.",
)
@click.option("--m", type=click.IntRange(1), help="Cloud size (clouds).")
@click.option(
    "--t-max",
    type=float,
    default=1.0,
    show_default=True,
    help="Time extent: t_max of the continuous box, n of the lattice box.",
)
@click.option(
    "--x-max",
    type=float,
    default=1.0,
    show_default=True,
    help="Half-width: x_max of the continuous box, h of the lattice box.",
)
@click.option("--alpha", type=float, help="Tail exponent in (0, 2).")
@click.option("--top-k", type=click.IntRange(1), help="Records kept (field).")
@click.option(
    "--method",
    type=click.Choice(FIELD_METHODS),
    default="auto",
    show_default=True,
    help="Lattice field sampling method.",
)
@click.option("--ell", type=click.IntRange(1), help="Records kept (ppp).")
@click.option("--q", type=float, help="Strip half-width (ppp).")
@click.option(
    "--stream", type=click.IntRange(0, 2**64 - 1), default=0,
    show_default=True, help="Stream index under the master seed.",
)
@seed_option
@click.option(
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Output file. Defaults to stdout.",
)
@click.pass_context
def sample_command(
    ctx: click.Context,
    kind: str,
    m: Optional[int],
    t_max: float,
    x_max: float,
    alpha: Optional[float],
    top_k: Optional[int],
    method: str,
    ell: Optional[int],
    q: Optional[float],
    stream: int,
    seed: Optional[int],
    output: Optional[str],
):
    """
    Sample a random environment and write it as JSON.

    Lattice boxes use times 1..n (the time-0 column is excluded) and
    positions -h..h.

    Examples:

        elpp sample --kind uniform-cloud --m 1000 --seed 7

        elpp sample --kind lattice-field --t-max 256 --x-max 64 \\
            --alpha 1 --top-k 50 --seed 7

        elpp sample --kind ppp --ell 200 --alpha 1 --q 16 --seed 7
    """
    seed = _resolve_seed(seed)
    seed_spec = SeedSpec(seed, stream)

    def need(**values):
        missing = [k for k, v in values.items() if v is None]
        if missing:
            raise click.UsageError(f"--kind {kind} requires {missing}")

    if kind == UNIFORM_CLOUD:
        need(m=m)
        env = sample_uniform_cloud(
            m, Box(CONTINUOUS, t_max, x_max), seed_spec
        )
    elif kind == LATTICE_CLOUD:
        need(m=m)
        env = sample_lattice_cloud(
            m, Box(LATTICE, t_max, x_max), seed_spec
        )
    elif kind == LATTICE_FIELD:
        need(alpha=alpha, top_k=top_k)
        env = sample_lattice_field(
            Box(LATTICE, t_max, x_max), alpha, seed_spec, top_k,
            method=method,
        )
    else:
        need(ell=ell, alpha=alpha, q=q)
        env = sample_ppp_ordered(ell, alpha, q, seed_spec)

    document = env.to_dict()
    document["metadata"] = {
        **document["metadata"],
        **SerializationService.metadata(
            "sample", seed, _run_params(ctx, seed=seed)
        ),
    }
    _emit(SerializationService.dumps(document), output)


@cli.command(name="lpp")
@env_option
@click.option(
    "--budget", "--B", "budget", type=click.FloatRange(0), required=True,
    help="Entropy budget B.",
)
@click.option(
    "--count",
    type=click.IntRange(1),
    default=None,
    help="Also report the minimal entropy needed to collect this many "
    "points.",
)
@click.option(
    "--k-max",
    type=click.IntRange(1),
    default=None,
    help="Cap on the point count tracked by the solver.",
)
@output_options("json")
@click.pass_context
def lpp_command(
    ctx: click.Context,
    env_path: str,
    budget: float,
    count: Optional[int],
    k_max: Optional[int],
    output: Optional[str],
    fmt: str,
):
    """
    Exact E-LPP value of an environment for an entropy budget.

    Emits the value, a witness path attaining it, the budget and the
    witness entropy.

    Example:

        elpp lpp --env env.json --budget 1.0
    """
    env = SerializationService.read_environment(env_path)
    result = elpp_value(env, budget, k_max=k_max)
    payload = result.to_dict()
    if count is not None:
        payload["count"] = count
        payload["min_entropy"] = min_entropy_for_count(env, count)
    metadata = SerializationService.metadata(
        "lpp", env.seed.master_seed if env.seed else None, _run_params(ctx)
    )
    if fmt == "json":
        text = SerializationService.render_json(metadata, payload)
    elif fmt == "jsonl":
        text = SerializationService.render_jsonl(metadata, [payload])
    else:
        row = {k: v for k, v in payload.items() if k != "witness"}
        text = SerializationService.render_csv(metadata, [row])
    _emit(text, output)


@cli.command(name="var")
@env_option
@click.option("--beta", type=click.FloatRange(0), help="Inverse temperature.")
@click.option(
    "--betas",
    type=click.FloatRange(0),
    multiple=True,
    help="Ascending beta grid for a sweep. Repeat the flag per value.",
)
@click.option(
    "--ell", type=click.IntRange(0), required=True,
    help="Number of heaviest entries kept (or skipped with --tail).",
)
@click.option(
    "--tail",
    is_flag=True,
    default=False,
    help="Solve over the entries beyond the ell heaviest.",
)
@output_options("json")
@click.pass_context
def var_command(
    ctx: click.Context,
    env_path: str,
    beta: Optional[float],
    betas: tuple,
    ell: int,
    tail: bool,
    output: Optional[str],
    fmt: str,
):
    """
    Energy-entropy variational problem over an environment.

    With --beta, solves at one beta and emits the value and the maximizing
    entries. With --betas, sweeps the grid and emits beta, value and
    argmax size per row.

    Examples:

        elpp var --env env.json --beta 2 --ell 50

        elpp var --env env.json --betas 0.5 --betas 1 --betas 2 --ell 50 \\
            --format csv
    """
    if (beta is None) == (not betas):
        raise click.UsageError("give exactly one of --beta or --betas")
    env = SerializationService.read_environment(env_path)
    metadata = SerializationService.metadata(
        "var", env.seed.master_seed if env.seed else None, _run_params(ctx)
    )
    if betas:
        if tail:
            raise click.UsageError("--tail cannot be combined with --betas")
        rows = beta_sweep(env, betas, ell).rows()
        if fmt == "csv":
            text = SerializationService.render_csv(metadata, rows)
        elif fmt == "jsonl":
            text = SerializationService.render_jsonl(metadata, rows)
        else:
            text = SerializationService.render_json(metadata, {"sweep": rows})
    else:
        solve = solve_tail if tail else solve_variational
        payload = solve(env, beta, ell).to_dict()
        if fmt == "json":
            text = SerializationService.render_json(metadata, payload)
        elif fmt == "jsonl":
            text = SerializationService.render_jsonl(metadata, [payload])
        else:
            row = {k: v for k, v in payload.items() if k != "argmax"}
            row["argmax_size"] = len(payload["argmax"])
            text = SerializationService.render_csv(metadata, [row])
    _emit(text, output)


@cli.command(name="volume")
@click.option("--k", type=click.IntRange(1), required=True, help="Order k.")
@click.option("--t", type=click.FloatRange(0, min_open=True), required=True)
@click.option(
    "--B", "--budget", "budget", type=click.FloatRange(0, min_open=True),
    required=True, help="Entropy budget B.",
)
@click.option(
    "--samples", type=click.IntRange(1000), default=1_000_000,
    show_default=True, help="Monte Carlo samples.",
)
@click.option(
    "--discrete-n",
    type=click.IntRange(1),
    default=None,
    help="Also count the lattice body exhaustively for this n.",
)
@seed_option
@output_options("csv")
@click.pass_context
def volume_command(
    ctx: click.Context,
    k: int,
    t: float,
    budget: float,
    samples: int,
    discrete_n: Optional[int],
    seed: Optional[int],
    output: Optional[str],
    fmt: str,
):
    """
    Exact and Monte Carlo volume of the entropy body.

    Example:

        elpp volume --k 1 --t 1 --B 1 --samples 1000000 --seed 7
    """
    seed = _resolve_seed(seed)
    spinner = _spinner(f"Estimating volume for k={k}...")
    spinner.start()
    try:
        row = volume_mc(k, t, budget, samples, SeedSpec(seed, 0)).to_row()
        if discrete_n is not None:
            counted = count_lattice_body(k, discrete_n, budget)
            row.update(
                {
                    "discrete_n": discrete_n,
                    "discrete_count": counted.count,
                    "discrete_bound": counted.bound,
                }
            )
    finally:
        spinner.stop()
    metadata = SerializationService.metadata(
        "volume", seed, _run_params(ctx, seed=seed)
    )
    if fmt == "csv":
        text = SerializationService.render_csv(metadata, [row])
    elif fmt == "jsonl":
        text = SerializationService.render_jsonl(metadata, [row])
    else:
        text = SerializationService.render_json(metadata, row)
    _emit(text, output)


def _emit_report(ctx, name: str, report, seed: int, output, fmt) -> None:
    metadata = SerializationService.metadata(
        f"exp {name}", seed, _run_params(ctx, seed=seed)
    )
    if fmt == "jsonl":
        text = SerializationService.render_jsonl(
            metadata, (r.to_dict() for r in report.records)
        )
    elif fmt == "csv":
        text = SerializationService.render_csv(
            metadata, report.summary_rows()
        )
    else:
        text = SerializationService.render_json(metadata, report.to_dict())
    _emit(text, output)
    if not report.passed:
        failed = [k for k, v in report.checks.items() if not v]
        click.echo(f"failed checks: {', '.join(failed)}", err=True)


def _run_experiment(ctx, name: str, runner, seed, output, fmt, **kwargs):
    seed = _resolve_seed(seed)
    started = arrow.utcnow()
    spinner = _spinner(f"Running {name} experiment...")
    spinner.start()
    try:
        report = runner(master_seed=seed, **kwargs)
    finally:
        spinner.stop()
    logger.info(
        "%s experiment took %s", name, arrow.utcnow() - started
    )
    _emit_report(ctx, name, report, seed, output, fmt)


@cli.group(name="exp")
def exp():
    """Replica experiments."""


@exp.command(name="tail")
@click.option("--m", type=click.IntRange(1), required=True)
@click.option("--budget", "--B", "budget", type=click.FloatRange(0),
              required=True)
@click.option("--t", type=float, default=None, help="Continuous box time.")
@click.option("--x", type=float, default=None, help="Continuous half-width.")
@click.option("--n", type=click.IntRange(1), default=None, help="Lattice n.")
@click.option("--h", type=click.IntRange(1), default=None, help="Lattice h.")
@click.option("--c0", type=float, default=None,
              help="Constant for the reported tail bound curve.")
@experiment_options
@click.pass_context
def exp_tail(ctx, m, budget, t, x, n, h, c0, replicas, strict, threads,
             seed, output, fmt):
    """
    E-LPP value distribution over random clouds: empirical tail, scale
    proxy and minimal-entropy ratio.

    Example:

        elpp exp tail --m 100 --B 1 --t 1 --x 1 --replicas 10000 --seed 7
    """
    _run_experiment(
        ctx, "tail", harness.run_tail_experiment, seed, output, fmt,
        m=m, budget=budget, t=t, x=x, n=n, h=h, c0=c0, replicas=replicas,
        threads=threads, strict=strict,
    )


@exp.command(name="scaling")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", "betas", type=click.FloatRange(0, min_open=True),
              multiple=True, required=True, help="Repeat per beta.")
@click.option("--ell", type=click.IntRange(1), required=True)
@click.option("--q", type=float, required=True)
@click.option(
    "--independent/--shared-streams",
    default=True,
    show_default=True,
    help="Draw the beta = 1 reference sample from its own streams.",
)
@experiment_options
@click.pass_context
def exp_scaling(ctx, alpha, betas, ell, q, independent, replicas, strict,
                threads, seed, output, fmt):
    """
    Scaling relation of the continuum variational value in beta.

    Example:

        elpp exp scaling --alpha 1 --beta 2 --ell 200 --q 16 \\
            --replicas 2000 --seed 7
    """
    _run_experiment(
        ctx, "scaling", harness.run_scaling_experiment, seed, output, fmt,
        alpha=alpha, betas=list(betas), ell=ell, q=q,
        independent=independent, replicas=replicas, threads=threads,
        strict=strict,
    )


@exp.command(name="convergence")
@click.option("--alpha", type=float, required=True)
@click.option("--nu", type=click.FloatRange(0), required=True)
@click.option("--q", type=float, required=True)
@click.option("--ell", type=click.IntRange(1), required=True)
@click.option("--n", "ladder", type=click.IntRange(1), multiple=True,
              required=True, help="Ladder rung n. Repeat per rung.")
@click.option("--gamma", type=float, default=None,
              help="h = n**gamma. Defaults to ELPP_CONVERGENCE_GAMMA (0.75).")
@experiment_options
@click.pass_context
def exp_convergence(ctx, alpha, nu, q, ell, ladder, gamma, replicas, strict,
                    threads, seed, output, fmt):
    """
    Lattice-to-continuum convergence of the rescaled variational value.

    Example:

        elpp exp convergence --alpha 1 --nu 1 --q 4 --ell 50 \\
            --n 256 --n 1024 --n 4096 --replicas 1000 --seed 7
    """
    _run_experiment(
        ctx, "convergence", harness.run_convergence_experiment, seed,
        output, fmt,
        alpha=alpha, nu=nu, q=q, ell=ell, ladder=list(ladder), gamma=gamma,
        replicas=replicas, threads=threads, strict=strict,
    )


@exp.command(name="truncation")
@click.option("--alpha", type=float, required=True)
@click.option("--q", type=float, required=True)
@click.option("--ell", "ells", type=click.IntRange(1), multiple=True,
              required=True, help="Truncation level. Repeat per level.")
@click.option("--mode", type=click.Choice(["continuum", "discrete"]),
              default="continuum", show_default=True)
@click.option("--nu", type=click.FloatRange(0), default=1.0,
              show_default=True)
@click.option("--n", type=click.IntRange(1), default=None,
              help="Lattice n (discrete mode).")
@click.option("--h", type=float, default=None,
              help="Lattice h (discrete mode).")
@click.option("--top-k", type=click.IntRange(1), default=None,
              help="Records kept per field (discrete mode).")
@experiment_options
@click.pass_context
def exp_truncation(ctx, alpha, q, ells, mode, nu, n, h, top_k, replicas,
                   strict, threads, seed, output, fmt):
    """
    Decay of the variational value carried beyond the largest weights.

    Example:

        elpp exp truncation --alpha 1 --q 4 --ell 8 --ell 16 --ell 32 \\
            --replicas 500 --seed 7
    """
    _run_experiment(
        ctx, "truncation", harness.run_truncation_experiment, seed, output,
        fmt,
        alpha=alpha, q=q, ells=list(ells), mode=mode, nu=nu, n=n, h=h,
        top_k=top_k, replicas=replicas, threads=threads, strict=strict,
    )


@exp.command(name="blowup")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=click.FloatRange(0), required=True)
@click.option("--q", "q_ladder", type=float, multiple=True, required=True,
              help="Strip half-width rung. Repeat per rung.")
@click.option("--ell0", type=float, required=True,
              help="Records per unit half-width; rung q keeps ceil(ell0 q).")
@click.option("--control-alpha", type=float, default=1.0, show_default=True)
@experiment_options
@click.pass_context
def exp_blowup(ctx, alpha, beta, q_ladder, ell0, control_alpha, replicas,
               strict, threads, seed, output, fmt):
    """
    Divergence of the continuum value for alpha <= 1/2, against a control.

    Example:

        elpp exp blowup --alpha 0.4 --beta 1 --q 2 --q 8 --q 32 \\
            --ell0 4 --replicas 500 --seed 7
    """
    _run_experiment(
        ctx, "blowup", harness.run_blowup_demo, seed, output, fmt,
        alpha=alpha, beta=beta, q_ladder=list(q_ladder), ell0=ell0,
        control_alpha=control_alpha, replicas=replicas, threads=threads,
        strict=strict,
    )


@cli.command(name="selftest")
@click.option(
    "--full",
    is_flag=True,
    default=False,
    help="Run at acceptance size instead of the quick size.",
)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0,
              show_default=True)
@click.option(
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Output file. Defaults to stdout.",
)
def selftest_command(full: bool, seed: int, output: Optional[str]):
    """
    Oracle-equivalence, duality and volume suites. Exits 1 on failure.
    """
    spinner = _spinner("Running self test...")
    spinner.start()
    try:
        report = run_selftest(quick=not full, master_seed=seed)
    finally:
        spinner.stop()
    _emit(SerializationService.dumps(report.to_dict(), indent=2), output)
    if not report.passed:
        failed = [k for k, v in report.checks.items() if not v]
        raise ExperimentCheckError(f"self test failed: {failed}")


def _report_error(exc: BaseException, message: str) -> None:
    click.echo(
        SerializationService.dumps(
            {"error": type(exc).__name__, "message": message}
        ),
        err=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit code."""
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="elpp",
            standalone_mode=False,
        )
    except click.exceptions.Abort as e:
        _report_error(e, "aborted")
        return 1
    except click.ClickException as e:
        _report_error(e, e.format_message())
        return 1
    except (EnvironmentFormatError, OSError) as e:
        _report_error(e, getattr(e, "message", str(e)))
        return 2
    except ContractViolationError as e:
        _report_error(e, e.message)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Command-line entry point for the cat-state simulator.

Every verb is deterministic: no random numbers are drawn anywhere, so
``--seedless`` is accepted only to be recorded in the run metadata.
"""

import functools
import json
import sys
from typing import Any, Dict, List, Optional, Tuple

import click
from pydantic import ValidationError

from core.config import settings
from core.constants import constants_metadata
from core.logging import configure_logging, get_logger
from domain.models.exceptions import ArtifactIOError, SimulationError, ToleranceError
from domain.models.requests.device import DeviceParams, TimingParams
from domain.models.requests.heralding import HeraldRequest
from domain.models.requests.loss import LossModel
from domain.models.requests.protocol import ProtocolConfig
from domain.models.requests.pulse import CavityParams, EnvelopeKind, EnvelopeSpec
from domain.models.requests.sweep import SweepRequest
from domain.repositories.artifact_repository import ArtifactRepository, to_jsonable
from domain.repositories.parameter_repository import ParameterRepository
from domain.services.deps import build_experiment_service

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TOLERANCE = 2
EXIT_IO = 3

logger = get_logger(__name__)


def handle_errors(command):
    """Map domain errors onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ToleranceError as e:
            logger.error("Tolerance check failed", error=str(e))
            click.echo(f"tolerance failure: {e}", err=True)
            sys.exit(EXIT_TOLERANCE)
        except (ArtifactIOError, OSError) as e:
            logger.error("Artifact I/O failed", error=str(e))
            click.echo(f"i/o failure: {e}", err=True)
            sys.exit(EXIT_IO)
        except (ValidationError, SimulationError) as e:
            logger.error("Validation failed", error=str(e))
            click.echo(f"validation failure: {e}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def parse_grid(ctx, param, value: Optional[str]) -> Optional[Tuple[int, int]]:
    if value is None:
        return None
    try:
        nx, np_ = (int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter("expected NX,NP")
    if nx < 2 or np_ < 2:
        raise click.BadParameter("NX and NP must be at least 2")
    return nx, np_


def echo_json(payload: Any) -> None:
    click.echo(json.dumps(to_jsonable(payload), sort_keys=True, indent=2))


def run_metadata(seedless: bool, **extra) -> Dict[str, Any]:
    return {
        "app_version": settings.app_version,
        "constants": constants_metadata(),
        "seedless": seedless,
        **extra,
    }


@click.group()
@click.option("--log-level", default=None, help="Override LOG_LEVEL for this run.")
def cli(log_level: Optional[str]):
    """Simulate heralded multistep cat-state preparation in pulsed optomechanics."""
    if log_level:
        settings.log_level = log_level
    configure_logging()


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True, help="Protocol YAML/JSON.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--grid", callback=parse_grid, default=None, help="Grid samples as NX,NP.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "bin"]), default="csv", show_default=True)
@click.option("--seedless", is_flag=True, help="Recorded in metadata; runs are always deterministic.")
@click.option("--dry-run", is_flag=True, help="Validate and print the configuration only.")
@click.option("--slices/--no-slices", default=True, show_default=True, help="Write W(0,P) and W(X,Nμ/2).")
@click.option("--png/--no-png", default=True, show_default=True, help="Render heat maps.")
@handle_errors
def state(config_path, out_dir, grid, fmt, seedless, dry_run, slices, png):
    """Wigner functions after every step plus the final measures.

    The configuration file holds ProtocolConfig fields and, for coherent input,
    an optional ``loss`` block with LossModel fields.
    """
    data = ParameterRepository().load_mapping(config_path)
    loss = LossModel.model_validate(data.pop("loss")) if "loss" in data else None
    config = ProtocolConfig.model_validate(data)
    if dry_run:
        echo_json({"config": config, "loss": loss})
        return

    service = build_experiment_service()
    artifacts = ArtifactRepository(out_dir or settings.output_dir)
    run = service.run_state(config, loss)
    metadata = run_metadata(seedless, config=config.model_dump(mode="json"))

    for step, step_state in enumerate(run.states):
        sampling = service.grid_for(step_state, *(grid or (None, None)))
        field = service.phase_space_service.evaluate(step_state, sampling)
        step_meta = {**metadata, "step": step, "grid": sampling.to_dict(), "success_weight": run.weights[step]}
        if fmt == "csv":
            artifacts.write_wigner_csv(f"wigner_step{step}.csv", sampling, field, step_meta)
        elif fmt == "bin":
            artifacts.write_wigner_bin(f"wigner_step{step}.bin", sampling, field, step_meta)
        else:
            artifacts.write_json(f"wigner_step{step}.json", {"metadata": step_meta, "grid": sampling.to_dict(), "w": field})
        if png:
            artifacts.write_heatmap(f"wigner_step{step}.png", sampling, field, title=f"N = {step}")
        if slices:
            for axis, (coords, values) in service.slices(step_state, sampling, step * config.coupling).items():
                artifacts.write_slice_csv(f"slice_{axis}_step{step}.csv", axis, coords, values, step_meta)

    report = service.measure(run.final, config)
    artifacts.write_json("measures.json", {"metadata": metadata, "measures": report})
    echo_json(report)


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Table parameter file.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--rows", default=None, help="Comma-separated row labels to compute.")
@click.option("--quick", is_flag=True, help="Only the proposal_iii row.")
@click.option("--seedless", is_flag=True, help="Recorded in metadata; runs are always deterministic.")
@click.option("--dry-run", is_flag=True, help="Validate and print the parameter sets only.")
@handle_errors
def table1(config_path, out_dir, rows, quick, seedless, dry_run):
    """Recompute the device table and compare against the expected values."""
    spec = ParameterRepository().load_table1(config_path)
    labels: Optional[List[str]] = rows.split(",") if rows else None
    if quick:
        labels = ["proposal_iii"]
    if dry_run:
        echo_json(spec)
        return

    report = build_experiment_service().table1(spec, labels)
    artifacts = ArtifactRepository(out_dir or settings.output_dir)
    artifacts.write_json("table1.json", {"metadata": run_metadata(seedless), "report": report})
    artifacts.write_rows_csv(
        "table1.csv",
        [row.model_dump(exclude={"checks"}) for row in report.rows],
        run_metadata(seedless),
    )

    click.echo(f"{'row':<14}{'n_th':>11}{'T_tot':>12}{'min W':>9}{'delta':>8}{'I':>8}{'M':>8}  status")
    for row in report.rows:
        click.echo(
            f"{row.label:<14}{row.per_step_thermal:>11.3e}{row.total_time:>12.4g}{row.min_w:>9.3f}"
            f"{row.delta:>8.3f}{row.lee_jeong:>8.3f}{row.macroscopicity:>8.3f}  {'ok' if row.passed else 'FAIL'}"
        )
    if not report.passed:
        failed = [f"{row.label}.{c.column}" for row in report.rows for c in row.checks if not c.passed]
        raise ToleranceError(f"cells outside tolerance: {', '.join(failed)}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Sweep YAML/JSON.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--workers", type=int, default=None, help="Worker processes; 0 uses every core.")
@click.option("--quick", is_flag=True, help="Small sweep: N ≤ 3, μ = 1, n̄_th = 1e-3, n̄ = 0.")
@click.option("--seedless", is_flag=True, help="Recorded in metadata; runs are always deterministic.")
@click.option("--dry-run", is_flag=True, help="Validate and print the sweep only.")
@handle_errors
def sweep(config_path, out_dir, workers, quick, seedless, dry_run):
    """Measures against step number over couplings, decoherence and occupations."""
    if config_path:
        request = ParameterRepository().load_model(config_path, SweepRequest)
    elif quick:
        request = SweepRequest(steps=[0, 1, 2, 3], couplings=[1.0], per_step_thermal=[1e-3], initial_occupations=[0.0])
    else:
        request = SweepRequest()
    if dry_run:
        echo_json(request)
        return

    report = build_experiment_service().sweep(request, workers)
    artifacts = ArtifactRepository(out_dir or settings.output_dir)
    metadata = run_metadata(seedless, **report.metadata)
    artifacts.write_rows_csv("sweep.csv", [p.model_dump() for p in report.points], metadata)

    plot_files = []
    if request.plots:
        for coupling in request.couplings:
            for measure in ("min_w", "delta", "lee_jeong", "macroscopicity"):
                series: Dict[str, Dict[int, float]] = {}
                for point in report.points:
                    if point.coupling == coupling:
                        label = f"n_th={point.per_step_thermal:g}, n={point.initial_occupation:g}"
                        series.setdefault(label, {})[point.steps] = getattr(point, measure)
                path = artifacts.write_series_plot(f"sweep_mu{coupling:g}_{measure}.png", series, measure, f"μ = {coupling:g}")
                plot_files.append(str(path))
    report = report.model_copy(update={"plot_files": plot_files or None})
    artifacts.write_json("sweep.json", {"metadata": metadata, "report": report})
    echo_json({"optimal_steps": report.optimal_steps, "points": len(report.points)})


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True, help="Device or herald request file.")
@click.option("--runs", type=int, default=None, help="Successful runs required.")
@click.option("--dry-run", is_flag=True, help="Validate and print the request only.")
@handle_errors
def herald(config_path, runs, dry_run):
    """Heralding probabilities, total experiment time and feasibility."""
    data = ParameterRepository().load_mapping(config_path)
    request = HeraldRequest.model_validate(data if "device" in data else {"device": data})
    if runs is not None:
        request = request.model_copy(update={"timing": TimingParams(runs=runs)})
    if dry_run:
        echo_json(request)
        return

    service = build_experiment_service()
    config = request.config or service.protocol_config_for(request.device)
    echo_json(service.heralding_service.herald_report(config, request.device, request.timing))


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Cavity YAML/JSON.")
@click.option("--g0", type=float, default=None, help="Single-photon coupling g₀ (rad/s).")
@click.option("--kappa", type=float, default=None, help="Cavity decay κ (rad/s).")
@click.option("--envelope", type=click.Choice([k.value for k in EnvelopeKind]), default="matched", show_default=True)
@click.option("--duration", type=float, default=None, help="Square pulse duration (s).")
@click.option("--width", type=float, default=None, help="Gaussian width (s).")
@click.option("--table", "table_path", type=click.Path(dir_okay=False), default=None, help="Envelope CSV t,re[,im].")
@handle_errors
def pulse(config_path, g0, kappa, envelope, duration, width, table_path):
    """Coupling μ delivered by a pulse envelope."""
    repository = ParameterRepository()
    if config_path:
        params = repository.load_cavity(config_path)
    else:
        if g0 is None or kappa is None:
            raise click.UsageError("give --config or both --g0 and --kappa")
        samples = repository.load_envelope_samples(table_path) if table_path else None
        spec = EnvelopeSpec(kind=envelope, duration=duration, width=width, samples=samples, table_path=table_path)
        params = CavityParams(g0=g0, kappa=kappa, envelope=spec)
    echo_json(build_experiment_service().pulse_service.coupling_from_pulse(params))


@cli.command("oracle-check")
@click.option("--quick", is_flag=True, help="N ≤ 2, μ = 1, n̄ ∈ {0, 0.1}, n̄_th ∈ {0, 1e-3}.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@handle_errors
def oracle_check(quick, out_dir):
    """Compare the analytic engine with the Fock-basis simulation."""
    report = build_experiment_service().oracle_check(quick)
    ArtifactRepository(out_dir or settings.output_dir).write_json("oracle_check.json", report)
    for cell in report.cells:
        worst = max(cell.measure_differences.values()) if cell.measure_differences else 0.0
        click.echo(
            f"N={cell.steps} mu={cell.coupling:g} n={cell.initial_occupation:g} n_th={cell.per_step_thermal:g} "
            f"D={cell.dimension} sup|dW|={cell.wigner_sup_norm:.2e} max|dM|={worst:.2e} "
            f"{'ok' if cell.passed else 'FAIL'}"
        )
    for check in report.loss_checks:
        click.echo(
            f"loss {check.input_kind.value} N={check.steps} eta={check.efficiency:g} "
            f"trace distance={check.trace_distance:.2e} {'ok' if check.passed else 'FAIL'}"
        )
    if not report.passed:
        raise ToleranceError("engine and oracle disagree")


if __name__ == "__main__":
    cli()

"""Command-line entry points: simulate, evaluate, validate-map, serve, export."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .errors import (
    BackendError,
    BundleError,
    CacheMissError,
    FixtureMissError,
    MapValidationError,
    TownletError,
    TraceError,
    UnparsableJudgmentError,
)
from .judge import METRICS, ScoreReport, evaluate_trace, save_report
from .llm import LiveBackend, RecordReplayBackend
from .mapio import load_map, validate_map
from .trace import TraceReader

EXIT_OK = 0
EXIT_FAILED = 1  # validation or judgment said "no"
EXIT_USAGE = 2  # the user asked for something malformed
EXIT_BACKEND = 3  # LLM backend / cache trouble

SIM_MODEL = "gpt-4o"
JUDGE_MODEL = "gpt-4o-mini"

logger = logging.getLogger(__name__)


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _build_backend(
    backend: str,
    *,
    model: str,
    base_url: str,
    key_env: str,
    cache_dir: str | None,
    scripted_factory=None,
):
    if backend == "scripted":
        if scripted_factory is None:
            _fail(EXIT_USAGE, "scripted backend is not available for this command")
        return scripted_factory()
    if backend == "live":
        return LiveBackend(base_url=base_url, model=model, key_env_var=key_env)
    if backend in ("record", "replay"):
        if not cache_dir:
            _fail(EXIT_USAGE, f"--cache-dir is required for --backend {backend}")
        inner = (
            LiveBackend(base_url=base_url, model=model, key_env_var=key_env)
            if backend == "record"
            else None
        )
        return RecordReplayBackend(cache_dir=cache_dir, mode=backend, inner=inner, model=model)
    _fail(EXIT_USAGE, f"unknown backend {backend!r}")


@click.group()
@click.version_option(package_name="townlet")
def main() -> None:
    """Tile-world multi-agent event simulation."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--scenario", "scenario_ref", required=True, help="Builtin id or scenario file.")
@click.option("--variant", type=click.Choice(["basic", "hard"]), default="basic")
@click.option("--ticks", type=int, default=1440, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option(
    "--backend",
    type=click.Choice(["scripted", "live", "record", "replay"]),
    default="scripted",
    show_default=True,
)
@click.option("--model", default=SIM_MODEL, show_default=True)
@click.option("--base-url", default="https://api.openai.com/v1", show_default=True)
@click.option("--key-env", default="OPENAI_API_KEY", show_default=True,
              help="Name of the environment variable holding the API key.")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
              help="Response cache directory (record/replay backends).")
@click.option("--minutes-per-tick", type=int, default=1, show_default=True)
def simulate(
    scenario_ref: str,
    variant: str,
    ticks: int,
    seed: int,
    out_path: str,
    backend: str,
    model: str,
    base_url: str,
    key_env: str,
    cache_dir: str | None,
    minutes_per_tick: int,
) -> None:
    """Run one scenario and write a trace file."""
    from .scenarios import get_scenario, run_scenario, scripted_backend

    if ticks < 1:
        _fail(EXIT_USAGE, "--ticks must be >= 1")
    if minutes_per_tick < 1:
        _fail(EXIT_USAGE, "--minutes-per-tick must be >= 1")
    try:
        scenario = get_scenario(scenario_ref)
    except (BundleError, MapValidationError) as exc:
        _fail(EXIT_USAGE, str(exc))
    llm = _build_backend(
        backend,
        model=model,
        base_url=base_url,
        key_env=key_env,
        cache_dir=cache_dir,
        scripted_factory=lambda: scripted_backend(scenario, variant),
    )
    try:
        reader = run_scenario(
            scenario,
            variant,
            llm,
            out_path=out_path,
            ticks=ticks,
            seed=seed,
            minutes_per_tick=minutes_per_tick,
        )
    except (CacheMissError, FixtureMissError, BackendError) as exc:
        _fail(EXIT_BACKEND, str(exc))
    except TownletError as exc:
        _fail(EXIT_FAILED, str(exc))
    click.echo(
        f"wrote {out_path}: {len(reader.events())} events over "
        f"{reader.final_tick} ticks ({scenario.id}, {variant})"
    )


@main.command()
@click.option("--trace", "trace_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--map-dir", "maps_dir", type=click.Path(file_okay=False), default=None,
              help="Directory of map bundles; defaults to builtin scenario maps.")
@click.option("--metrics", default=",".join(METRICS), show_default=True)
@click.option(
    "--backend",
    type=click.Choice(["scripted", "live", "record", "replay"]),
    default="scripted",
    show_default=True,
)
@click.option("--model", default=JUDGE_MODEL, show_default=True)
@click.option("--base-url", default="https://api.openai.com/v1", show_default=True)
@click.option("--key-env", default="OPENAI_API_KEY", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here as well.")
def evaluate(
    trace_paths: tuple[str, ...],
    maps_dir: str | None,
    metrics: str,
    backend: str,
    model: str,
    base_url: str,
    key_env: str,
    cache_dir: str | None,
    out_path: str | None,
) -> None:
    """Judge one or more traces and print the score table."""
    from .judge import scripted_judge_backend

    wanted = tuple(m.strip() for m in metrics.split(",") if m.strip())
    for metric in wanted:
        if metric not in METRICS:
            _fail(EXIT_USAGE, f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    llm = _build_backend(
        backend,
        model=model,
        base_url=base_url,
        key_env=key_env,
        cache_dir=cache_dir,
        scripted_factory=scripted_judge_backend,
    )
    report = ScoreReport()
    for trace_path in trace_paths:
        try:
            reader = TraceReader(trace_path)
        except TraceError as exc:
            _fail(EXIT_USAGE, f"{trace_path}: {exc}")
        world = _world_for_trace(reader, maps_dir)
        try:
            report.scenarios.append(
                evaluate_trace(reader, world, llm, metrics=wanted)
            )
        except (CacheMissError, FixtureMissError) as exc:
            _fail(EXIT_BACKEND, str(exc))
        except UnparsableJudgmentError as exc:
            _fail(EXIT_FAILED, str(exc))
        except BackendError as exc:
            _fail(EXIT_BACKEND, str(exc))
    click.echo(report.table())
    if out_path:
        save_report(report, out_path)
        click.echo(f"report written to {out_path}")


def _world_for_trace(reader: TraceReader, maps_dir: str | None):
    map_id = reader.header.map_id
    if maps_dir is not None:
        try:
            return load_map(Path(maps_dir) / map_id)
        except (BundleError, MapValidationError) as exc:
            _fail(EXIT_USAGE, f"cannot load map {map_id!r} from {maps_dir}: {exc}")
    from .scenarios import builtin_scenarios

    for scenario in builtin_scenarios().values():
        if scenario.world.id == map_id:
            return scenario.world
    _fail(EXIT_USAGE, f"map {map_id!r} is not builtin; pass --map-dir")


@main.command("validate-map")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
def validate_map_cmd(bundle_dir: str) -> None:
    """Validate a map bundle; prints the violation report."""
    try:
        world = load_map(bundle_dir, validate=False)
    except BundleError as exc:
        _fail(EXIT_USAGE, str(exc))
    report = validate_map(world)
    click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    if not report.ok:
        sys.exit(EXIT_FAILED)


@main.command()
@click.option("--data-dir", type=click.Path(file_okay=False), default="data", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8642, show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built studio frontend.")
def serve(data_dir: str, host: str, port: int, static_dir: str | None) -> None:
    """Serve the HTTP API (and the studio, when built)."""
    import uvicorn

    from .server import create_app

    app = create_app(data_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command("export-scenarios")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def export_scenarios(out_dir: str) -> None:
    """Write every builtin scenario (map bundle + descriptor) to a directory."""
    from .scenarios import builtin_scenarios, export_scenario

    for scenario in builtin_scenarios().values():
        path = export_scenario(scenario, out_dir)
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()

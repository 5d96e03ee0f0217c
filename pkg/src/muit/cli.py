"""Command-line entry point.

Exit codes are a stable contract: 0 success, 1 domain error (bad source,
bad workload, unsupported WSDL), 2 environment error (missing files,
unreachable URLs, ports in use). The `MUIT_LOG` environment variable
sets the log level; -v/-vv on the command line take precedence.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import socket
import sys
from importlib import metadata
from pathlib import Path

import click
import tomli

DEFAULT_SWEEP = (100, 500, 1000)


class DomainFailure(click.ClickException):
    exit_code = 1


class EnvFailure(click.ClickException):
    exit_code = 2


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise EnvFailure(str(exc))


def _log_level(verbose: int) -> int:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    name = os.environ.get("MUIT_LOG", "").strip().upper()
    if name:
        level = logging.getLevelName(name)
        if isinstance(level, int):
            return level
        raise EnvFailure(f"MUIT_LOG: unknown level {name!r}")
    return logging.WARNING


@click.group()
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Log more: -v for info, -vv for debug. Overrides MUIT_LOG.",
)
def main(verbose: int) -> None:
    """Compile task UIs, derive them from WSDL, serve them, simulate load."""
    logging.basicConfig(
        level=_log_level(verbose),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


@main.command("compile")
@click.argument("source", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Bundle output directory; defaults to <source stem>.bundle/ beside the source.",
)
@click.option(
    "--app-name",
    default=None,
    help="Name recorded in the bundle manifest; defaults to the source file stem.",
)
def compile_cmd(source: Path, out: Path | None, app_name: str | None) -> None:
    """Compile a .muit source file into a page bundle."""
    from muit.codegen import CompileError, CompileOptions, compile_bundle, write_bundle
    from muit.dsl import analyze

    text = _read_text(source)
    result = analyze(text)
    for diag in result.sink.diagnostics:
        click.echo(diag.format(str(source)), err=True)
    if not result.ok:
        raise DomainFailure(f"{len(result.sink.errors)} error(s) in {source}")
    name = app_name or source.stem
    try:
        bundle = compile_bundle(result.module, CompileOptions(app_name=name))
    except CompileError as exc:
        raise DomainFailure(str(exc))
    out = out or source.with_suffix(".bundle")
    try:
        write_bundle(bundle, out)
    except OSError as exc:
        raise EnvFailure(str(exc))
    click.echo(f"wrote {out}")


@main.command("import-wsdl")
@click.argument("wsdl")
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Path for the derived .muit source; defaults to <wsdl stem>.muit.",
)
def import_wsdl_cmd(wsdl: str, out: Path | None) -> None:
    """Derive editable .muit source from a WSDL file or URL."""
    from muit.dsl import analyze
    from muit.wsdl import WsdlError, import_wsdl

    if wsdl.startswith(("http://", "https://")):
        import httpx

        try:
            response = httpx.get(wsdl, timeout=30.0)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise EnvFailure(f"fetching {wsdl}: {exc}")
        text = response.text
        stem = Path(wsdl.rstrip("/").rsplit("/", 1)[-1] or "service").stem or "service"
    else:
        path = Path(wsdl)
        if not path.is_file():
            raise EnvFailure(f"no such file: {wsdl}")
        text = _read_text(path)
        stem = path.stem
    try:
        _, source = import_wsdl(text)
    except WsdlError as exc:
        raise DomainFailure(str(exc))
    # The transformer promises its output compiles; hold it to that
    # before handing the file to the user.
    result = analyze(source)
    if not result.ok:
        raise DomainFailure(
            "derived source failed to compile: "
            + "; ".join(d.message for d in result.sink.errors)
        )
    out = out or Path(f"{stem}.muit")
    try:
        out.write_text(source, encoding="utf-8")
    except OSError as exc:
        raise EnvFailure(str(exc))
    click.echo(f"wrote {out}")


@main.command()
@click.option(
    "-c",
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Server TOML config: bind address, engine tuning, deployments.",
)
@click.option("--host", default=None, help="Bind address, overriding the config file.")
@click.option(
    "--port", type=int, default=None, help="Bind port, overriding the config file."
)
def serve(config_path: Path, host: str | None, port: int | None) -> None:
    """Run the engine until signaled, printing the bound address."""
    import uvicorn

    from muit.service import (
        ConfigError,
        DeploymentError,
        build_deployment,
        create_app,
        load_config,
    )

    try:
        config = load_config(config_path)
    except ConfigError as exc:
        raise EnvFailure(str(exc))
    if host is not None:
        config.host = host
    if port is not None:
        config.port = port

    deployments = []
    for spec in config.deployments:
        try:
            deployments.append(
                build_deployment(
                    spec.name, _read_text(Path(spec.source)), assignee=spec.assignee
                )
            )
        except DeploymentError as exc:
            raise DomainFailure(f"deployment {spec.name!r}: {exc}")

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((config.host, config.port))
    except OSError as exc:
        sock.close()
        raise EnvFailure(f"cannot bind {config.host}:{config.port}: {exc}")
    bound = sock.getsockname()
    click.echo(f"listening on {bound[0]}:{bound[1]}")
    sys.stdout.flush()

    app = create_app(deployments, config)
    # log_config=None keeps the logging set up in main(), so MUIT_LOG
    # governs the server's output too.
    server = uvicorn.Server(
        uvicorn.Config(app, host=config.host, port=config.port, log_config=None)
    )
    server.run(sockets=[sock])


@main.command()
@click.option(
    "--spec",
    "spec_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Workload TOML; omit for the default workload.",
)
@click.option(
    "--out",
    default="-",
    help="CSV report path, or - for standard output (the default).",
)
@click.option(
    "--passivation",
    type=click.Choice(["on", "off"]),
    default=None,
    help="Force the passivation sweep on or off, overriding the spec file.",
)
@click.option(
    "-n",
    "--callers",
    "n_values",
    type=int,
    multiple=True,
    help="Caller count to run; repeat for several. Overrides the spec file sweep.",
)
def simulate(
    spec_path: Path | None,
    out: str,
    passivation: str | None,
    n_values: tuple[int, ...],
) -> None:
    """Run the process-engine caller simulation and write a CSV report."""
    from muit.sim import SpecError, WorkloadSpec, sweep, write_csv

    raw: dict = {}
    if spec_path is not None:
        try:
            raw = tomli.loads(_read_text(spec_path))
        except tomli.TOMLDecodeError as exc:
            raise DomainFailure(f"{spec_path}: {exc}")
    sizes = raw.pop("n_values", list(DEFAULT_SWEEP))
    if not (isinstance(sizes, list) and sizes and all(isinstance(v, int) for v in sizes)):
        raise DomainFailure("n_values must be a non-empty list of integers")
    try:
        template = WorkloadSpec.from_mapping(raw)
    except SpecError as exc:
        raise DomainFailure(f"{spec_path}: {exc}")
    if passivation is not None:
        template = dataclasses.replace(template, passivation=(passivation == "on"))
    if n_values:
        sizes = list(n_values)

    try:
        reports = sweep(template, n_values=sizes)
    except SpecError as exc:
        raise DomainFailure(str(exc))
    if out == "-":
        write_csv(reports, sys.stdout)
    else:
        try:
            write_csv(reports, out)
        except OSError as exc:
            raise EnvFailure(str(exc))
        click.echo(f"wrote {out}")


@main.command()
def version() -> None:
    """Print the package version."""
    try:
        release = metadata.version("muit")
    except metadata.PackageNotFoundError:
        release = "unknown"
    click.echo(f"muit {release}")


if __name__ == "__main__":
    main()

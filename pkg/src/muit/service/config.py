"""TOML configuration for the server process.

Layout:

    [server]
    host = "127.0.0.1"
    port = 8080
    long_poll_s = 25.0
    sweep_interval_s = 1.0

    [engine]
    idle_threshold_s = 60.0
    queue_capacity = 1024
    # instance_deadline_s = 300.0   # omit for no deadline
    store_path = "instances.log"

    [notifications]
    default_channel = "log"         # or "none"
    [notifications.webhooks]
    lisi = "http://host/hook"       # recipient -> webhook URL

    [[deployment]]
    name = "approval"
    source = "corpus/approval_tasks.muit"
    assignee = "lisi"
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import tomli

from muit.engine import EngineConfig


class ConfigError(Exception):
    pass


@dataclass
class DeploymentSpec:
    name: str
    source: str
    assignee: str = ""


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    long_poll_s: float = 25.0
    sweep_interval_s: float = 1.0
    engine: EngineConfig = field(default_factory=EngineConfig)
    default_channel: str = "log"
    webhooks: dict[str, str] = field(default_factory=dict)
    deployments: list[DeploymentSpec] = field(default_factory=list)


_SERVER_KEYS = {"host", "port", "long_poll_s", "sweep_interval_s"}
_ENGINE_KEYS = {"idle_threshold_s", "queue_capacity", "instance_deadline_s", "store_path"}
_DEPLOYMENT_KEYS = {"name", "source", "assignee"}


def _reject_unknown(section: str, table: dict, allowed: set) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
        )


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    try:
        raw = tomli.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")
    return parse_config(raw, base_dir=path.parent)


def parse_config(raw: dict, base_dir: Path | None = None) -> ServiceConfig:
    config = ServiceConfig()

    server = raw.get("server", {})
    _reject_unknown("server", server, _SERVER_KEYS)
    config.host = str(server.get("host", config.host))
    config.port = int(server.get("port", config.port))
    config.long_poll_s = float(server.get("long_poll_s", config.long_poll_s))
    config.sweep_interval_s = float(
        server.get("sweep_interval_s", config.sweep_interval_s)
    )

    engine = raw.get("engine", {})
    _reject_unknown("engine", engine, _ENGINE_KEYS)
    ec = EngineConfig()
    ec.idle_threshold_s = float(engine.get("idle_threshold_s", ec.idle_threshold_s))
    ec.queue_capacity = int(engine.get("queue_capacity", ec.queue_capacity))
    if "instance_deadline_s" in engine:
        ec.instance_deadline_s = float(engine["instance_deadline_s"])
    if "store_path" in engine:
        store_path = Path(engine["store_path"])
        if base_dir is not None and not store_path.is_absolute():
            store_path = base_dir / store_path
        ec.store_path = str(store_path)
    config.engine = ec

    notifications = raw.get("notifications", {})
    _reject_unknown("notifications", notifications, {"default_channel", "webhooks"})
    config.default_channel = notifications.get("default_channel", "log")
    if config.default_channel not in ("log", "none"):
        raise ConfigError(
            f"default_channel must be 'log' or 'none', got {config.default_channel!r}"
        )
    webhooks = notifications.get("webhooks", {})
    config.webhooks = {str(k): str(v) for k, v in webhooks.items()}

    for entry in raw.get("deployment", []):
        _reject_unknown("deployment", entry, _DEPLOYMENT_KEYS)
        if "name" not in entry or "source" not in entry:
            raise ConfigError("each [[deployment]] needs 'name' and 'source'")
        source = Path(entry["source"])
        if base_dir is not None and not source.is_absolute():
            source = base_dir / source
        config.deployments.append(
            DeploymentSpec(
                name=str(entry["name"]),
                source=str(source),
                assignee=str(entry.get("assignee", "")),
            )
        )
    return config

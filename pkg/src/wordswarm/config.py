"""Configuration: one JSON document mirrored by dotted-path flag overrides.

The canonical structure is ``DEFAULTS``; a config file may set any subset
of its keys, and command-line overrides address leaves by dotted path
(``layout.speed_coefficient``). Unknown keys are rejected by name. The
typed parameter objects are built last so each owning module applies its
own range validation.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .euler import EulerParams
from .layout import LayoutParams, Viewport
from .scraper import FeedSource, FilterConfig, default_stoplist, load_stoplist
from .session import AnalyzerParams, SessionConfig


class ConfigError(ValueError):
    """Raised for unknown keys or out-of-range configuration values."""


DEFAULTS: dict = {
    "update_mode": "refresh",
    "tick_rate": 30.0,
    "snapshot_period": 5.0,
    "rng_seed": 0,
    "article_radius_factor": 3.0,
    "article_margin": None,
    "layout": {
        "speed_coefficient": 0.1,
        "timestep": 1.0,
        "max_displacement": None,
        "viewport": [0.0, 0.0, 1000.0, 1000.0],
        "stability_threshold": 0.05,
        "behaviors": ["collision_avoidance", "bounds_clamp"],
        "separation_slack": 0.0,
        "avoidance_gain": 0.5,
    },
    "euler": {
        "r_min": 10.0,
        "r_max": 50.0,
        "d_max": None,  # defaults to half the viewport diagonal
        "epsilon_overlap": 0.0,
    },
    "analyzer": {"window": 200, "f_min": 2, "n_max": 60},
    "filter": {"stoplist": None, "min_len": 3, "max_len": 20, "strip_markup": True},
    "sources": [],
    "server": {"host": "127.0.0.1", "port": 8787, "intake_stdin": False, "intake_tcp_port": None},
}

_SOURCE_KEYS = {"location", "kind", "poll_interval", "query_terms", "tag"}


@dataclass
class CliConfig:
    """Fully validated configuration for one command invocation."""

    session: SessionConfig
    filter: FilterConfig
    sources: list[FeedSource] = field(default_factory=list)
    host: str = "127.0.0.1"
    port: int = 8787
    intake_stdin: bool = False
    intake_tcp_port: int | None = None
    raw: dict = field(default_factory=dict)


def default_config() -> dict:
    return copy.deepcopy(DEFAULTS)


def _merge(base: dict, incoming: dict, prefix: str = "") -> None:
    for key, value in incoming.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {dotted!r}")
        if isinstance(base[key], dict) and not isinstance(value, dict):
            raise ConfigError(f"config key {dotted!r} must be an object")
        if isinstance(base[key], dict):
            _merge(base[key], value, prefix=f"{dotted}.")
        else:
            base[key] = value


def load_file(config: dict, path: str | Path) -> None:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError("config file must hold a JSON object")
    _merge(config, document)


def apply_override(config: dict, dotted: str, raw_value: str) -> None:
    """Set one leaf by dotted path; the value parses as JSON when possible
    and falls back to a bare string."""
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node = config
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown config key {dotted!r}")
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown config key {dotted!r}")
    if isinstance(node[leaf], dict):
        raise ConfigError(f"config key {dotted!r} is a section, not a value")
    node[leaf] = value


def build(config: dict) -> CliConfig:
    """Turn the merged document into validated parameter objects."""
    try:
        vp = config["layout"]["viewport"]
        if not (isinstance(vp, (list, tuple)) and len(vp) == 4):
            raise ConfigError("layout.viewport must be [x_min, y_min, x_max, y_max]")
        viewport = Viewport(*[float(v) for v in vp])
        lay = config["layout"]
        layout = LayoutParams(
            speed_coefficient=float(lay["speed_coefficient"]),
            timestep=float(lay["timestep"]),
            max_displacement=None if lay["max_displacement"] is None else float(lay["max_displacement"]),
            viewport=viewport,
            stability_threshold=float(lay["stability_threshold"]),
            behaviors=tuple(lay["behaviors"]),
            separation_slack=float(lay["separation_slack"]),
            avoidance_gain=float(lay["avoidance_gain"]),
        )
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"layout: {exc}") from exc

    try:
        eu = config["euler"]
        d_max = eu["d_max"]
        euler = EulerParams(
            r_min=float(eu["r_min"]),
            r_max=float(eu["r_max"]),
            d_max=viewport.diagonal / 2 if d_max is None else float(d_max),
            epsilon_overlap=float(eu["epsilon_overlap"]),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"euler: {exc}") from exc

    try:
        an = config["analyzer"]
        analyzer = AnalyzerParams(window=int(an["window"]), f_min=int(an["f_min"]), n_max=int(an["n_max"]))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"analyzer: {exc}") from exc

    try:
        session = SessionConfig(
            update_mode=str(config["update_mode"]),
            tick_rate=float(config["tick_rate"]),
            snapshot_period=float(config["snapshot_period"]),
            layout=layout,
            euler=euler,
            analyzer=analyzer,
            rng_seed=int(config["rng_seed"]),
            article_radius_factor=float(config["article_radius_factor"]),
            article_margin=None if config["article_margin"] is None else float(config["article_margin"]),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"session: {exc}") from exc

    try:
        fl = config["filter"]
        stoplist_path = fl["stoplist"]
        if stoplist_path is not None and not Path(stoplist_path).exists():
            raise ConfigError(f"filter.stoplist: no such file {stoplist_path!r}")
        stoplist = load_stoplist(stoplist_path) if stoplist_path else default_stoplist()
        filter_config = FilterConfig(
            stoplist=stoplist,
            min_len=int(fl["min_len"]),
            max_len=int(fl["max_len"]),
            strip_markup=bool(fl["strip_markup"]),
        )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"filter: {exc}") from exc

    sources: list[FeedSource] = []
    for k, entry in enumerate(config["sources"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"sources[{k}] must be an object")
        unknown = set(entry) - _SOURCE_KEYS
        if unknown:
            raise ConfigError(f"sources[{k}]: unknown key {sorted(unknown)[0]!r}")
        if "location" not in entry or "kind" not in entry:
            raise ConfigError(f"sources[{k}] needs 'location' and 'kind'")
        try:
            source = FeedSource(
                location=str(entry["location"]),
                kind=str(entry["kind"]),
                poll_interval=float(entry.get("poll_interval", 60.0)),
                query_terms=tuple(entry.get("query_terms", ())),
                tag=entry.get("tag"),
            )
        except ValueError as exc:
            raise ConfigError(f"sources[{k}]: {exc}") from exc
        if source.kind == "ndjson_file" and not Path(source.location).exists():
            raise ConfigError(f"sources[{k}].location: no such file {source.location!r}")
        sources.append(source)

    server = config["server"]
    tcp_port = server.get("intake_tcp_port")
    return CliConfig(
        session=session,
        filter=filter_config,
        sources=sources,
        host=str(server["host"]),
        port=int(server["port"]),
        intake_stdin=bool(server.get("intake_stdin", False)),
        intake_tcp_port=None if tcp_port is None else int(tcp_port),
        raw=config,
    )


def load(path: str | Path | None, overrides: list[tuple[str, str]], seed: int | None = None) -> CliConfig:
    """File (optional), then dotted overrides, then the --seed shortcut."""
    config = default_config()
    if path is not None:
        load_file(config, path)
    for dotted, raw_value in overrides:
        apply_override(config, dotted, raw_value)
    if seed is not None:
        config["rng_seed"] = seed
    return build(config)

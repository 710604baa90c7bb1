"""Service configuration: listen address, data directory, and session template."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..engine import GameConfig
from ..errors import DomainError
from ..extortion import ExtortionConfig, solve_response
from ..market import MarketParams, reference_points


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./sessions"
    idle_timeout_s: float = 3600.0
    clamp_negative_payout: bool = True
    k_min: float = 1.0
    k_max: float = 4.0
    template: GameConfig = field(default_factory=GameConfig)


def _market_from_config(d: dict) -> MarketParams:
    kwargs = {}
    for key in ("a", "c", "demand_scale"):
        if key in d:
            kwargs[key] = d[key]
    for key in ("x_bounds", "y_bounds"):
        if key in d:
            kwargs[key] = tuple(d[key])
    return MarketParams(**kwargs)


def load_service_config(path: str | None = None, **overrides) -> ServiceConfig:
    """Build the config from an optional JSON file plus keyword overrides.

    File keys: host, port, data_dir, idle_timeout_s, clamp_negative_payout,
    k_min, k_max, template {k, s_n, clamp, rounds, rounding, market {...}}.
    """
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    data.update(overrides)

    tmpl = data.pop("template", {})
    market = _market_from_config(tmpl.pop("market", {}))
    ext_kwargs = {}
    for key in ("k", "s_n", "root", "clamp"):
        if key in tmpl:
            ext_kwargs[key] = tmpl.pop(key)
    if "s_n" not in ext_kwargs:
        ext_kwargs["s_n"] = reference_points(market).nash.profit
    template = GameConfig(
        market=market,
        extortion=ExtortionConfig(**ext_kwargs),
        rounds=tmpl.pop("rounds", 600),
        rounding=tmpl.pop("rounding", 2),
    )
    if tmpl:
        raise DomainError(f"unknown template keys: {sorted(tmpl)}")

    known = {"host", "port", "data_dir", "idle_timeout_s", "clamp_negative_payout", "k_min", "k_max"}
    unknown = set(data) - known
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    return ServiceConfig(template=template, **{k: v for k, v in data.items() if k in known})


def validate_at_startup(config: ServiceConfig) -> None:
    """Fail fast: data directory writable and the template mathematically sound."""
    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    probe = data_dir / ".write-probe"
    probe.write_text("ok")
    probe.unlink()

    market = config.template.market
    reference_points(market)
    lo, hi = market.x_bounds
    for x in (lo, 0.5 * (lo + hi), hi):
        solve_response(x, config.template.extortion, market)
    if not (config.k_min <= config.template.extortion.k <= config.k_max):
        raise DomainError(
            f"template k={config.template.extortion.k} outside configured "
            f"[{config.k_min}, {config.k_max}]"
        )

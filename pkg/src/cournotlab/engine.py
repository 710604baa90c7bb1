"""Deterministic iterated-game loop with append-only round logging.

A session is a fixed number of rounds. Each round the rival submits a
quantity; the server answers with the algorithm quantity (responding to the
rival's previous submission, or to this one on the opening round), rounds both
to the display precision, computes profits from the rounded quantities, and
appends an immutable record. Replaying the stored decisions reproduces the
log byte for byte.
"""

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Union

from .agents import AgentSpec, decide, validate_spec
from .errors import DomainError, LogParseError, RejectedDecision, SessionClosed
from .extortion import ExtortionConfig, solve_response
from .market import MarketParams, DEFAULT_MARKET, profit_pair

STATUSES = ("active", "finished", "abandoned")


def round_half_up(value: float, decimals: int = 2) -> float:
    """Decimal half-up rounding, e.g. 0.115 -> 0.12 (not banker's)."""
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class GameConfig:
    market: MarketParams = DEFAULT_MARKET
    extortion: ExtortionConfig = ExtortionConfig()
    rounds: int = 600
    rounding: int = 2
    pin_y: float | None = None   # control sessions: constant algorithm quantity
    first_y: float | None = None  # optional fixed opening response

    def __post_init__(self):
        if self.rounds < 1:
            raise DomainError(f"rounds must be >= 1, got {self.rounds}")
        if not (0 <= self.rounding <= 6):
            raise DomainError(f"rounding decimals must be in [0, 6], got {self.rounding}")
        for name, v in (("pin_y", self.pin_y), ("first_y", self.first_y)):
            if v is not None and not (self.market.y_bounds[0] <= v <= self.market.y_bounds[1]):
                raise DomainError(f"{name}={v} outside algorithm bounds {self.market.y_bounds}")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    x: float
    y: float
    s_x: float
    s_y: float
    cum_x: float


@dataclass
class SessionRecord:
    session_id: str
    config: GameConfig
    agent: Union[AgentSpec, str]  # an AgentSpec, or "human" for live play
    seed: int
    rounds_log: list[RoundRecord] = field(default_factory=list)
    status: str = "active"


def step(session: SessionRecord, x_raw: float) -> RoundRecord:
    """Play one round: round the submission, respond, compute profits, append.

    Raises SessionClosed when the session is not active or already complete,
    and RejectedDecision (without consuming the round) for out-of-bounds
    submissions.
    """
    cfg = session.config
    if session.status != "active":
        raise SessionClosed(f"session {session.session_id} is {session.status}")
    if len(session.rounds_log) >= cfg.rounds:
        raise SessionClosed(f"session {session.session_id} already played {cfg.rounds} rounds")
    lo, hi = cfg.market.x_bounds
    if not (lo <= x_raw <= hi):
        raise RejectedDecision(f"quantity {x_raw} outside rival bounds {cfg.market.x_bounds}")

    x = round_half_up(x_raw, cfg.rounding)
    first = not session.rounds_log
    if cfg.pin_y is not None:
        y_raw = cfg.pin_y
    elif first and cfg.first_y is not None:
        y_raw = cfg.first_y
    else:
        x_prev = x if first else session.rounds_log[-1].x
        y_raw = solve_response(x_prev, cfg.extortion, cfg.market)
    y = round_half_up(y_raw, cfg.rounding)

    s_x, s_y = profit_pair(x, y, cfg.market)
    cum = session.rounds_log[-1].cum_x + s_x if session.rounds_log else s_x
    rec = RoundRecord(round=len(session.rounds_log) + 1, x=x, y=y, s_x=s_x, s_y=s_y, cum_x=cum)
    session.rounds_log.append(rec)
    if len(session.rounds_log) == cfg.rounds:
        session.status = "finished"
    return rec


def run_session(
    config: GameConfig,
    agent: AgentSpec,
    seed: int,
    session_id: str | None = None,
) -> SessionRecord:
    """Play a full session against a simulated rival; deterministic given the seed."""
    validate_spec(agent, config.market)
    session = SessionRecord(
        session_id=session_id or f"sim-{seed}",
        config=config,
        agent=agent,
        seed=seed,
    )
    for _ in range(config.rounds):
        x = decide(agent, session.rounds_log, config.market, config.extortion)
        step(session, x)
    return session


def replay(session: SessionRecord) -> SessionRecord:
    """Recompute every record from the stored decisions; must equal the original."""
    fresh = SessionRecord(
        session_id=session.session_id,
        config=session.config,
        agent=session.agent,
        seed=session.seed,
        status="active",
    )
    for rec in session.rounds_log:
        step(fresh, rec.x)
    fresh.status = session.status
    return fresh


# --- line-delimited serialization ------------------------------------------
# Header line: one JSON object with the session identity and config.
# Then one JSON object per round: {"round", "x", "y", "sx", "sy", "cumx"}.
# Floats are emitted with Python's shortest round-trip repr, so loading a dump
# reproduces the session exactly.


def _market_to_dict(m: MarketParams) -> dict:
    if m.price_fn is not None:
        raise DomainError("sessions with a custom price function cannot be serialized")
    return {
        "a": m.a,
        "c": m.c,
        "demand_scale": m.demand_scale,
        "x_bounds": list(m.x_bounds),
        "y_bounds": list(m.y_bounds),
    }


def _market_from_dict(d: dict) -> MarketParams:
    return MarketParams(
        a=d["a"],
        c=d["c"],
        demand_scale=d["demand_scale"],
        x_bounds=tuple(d["x_bounds"]),
        y_bounds=tuple(d["y_bounds"]),
    )


def _header_dict(session: SessionRecord) -> dict:
    cfg = session.config
    agent = session.agent
    return {
        "session_id": session.session_id,
        "seed": session.seed,
        "status": session.status,
        "agent": agent if isinstance(agent, str) else {
            "kind": agent.kind,
            "params": dict(agent.params),
            "seed": agent.seed,
        },
        "config": {
            "market": _market_to_dict(cfg.market),
            "extortion": {
                "k": cfg.extortion.k,
                "s_n": cfg.extortion.s_n,
                "root": cfg.extortion.root,
                "clamp": cfg.extortion.clamp,
            },
            "rounds": cfg.rounds,
            "rounding": cfg.rounding,
            "pin_y": cfg.pin_y,
            "first_y": cfg.first_y,
        },
    }


def _session_from_header(d: dict) -> SessionRecord:
    cfg = d["config"]
    agent = d["agent"]
    return SessionRecord(
        session_id=d["session_id"],
        config=GameConfig(
            market=_market_from_dict(cfg["market"]),
            extortion=ExtortionConfig(**cfg["extortion"]),
            rounds=cfg["rounds"],
            rounding=cfg["rounding"],
            pin_y=cfg.get("pin_y"),
            first_y=cfg.get("first_y"),
        ),
        agent=agent if isinstance(agent, str) else AgentSpec(
            kind=agent["kind"], params=agent["params"], seed=agent["seed"]
        ),
        seed=d["seed"],
        status=d["status"],
    )


def round_line(rec: RoundRecord) -> str:
    return json.dumps(
        {"round": rec.round, "x": rec.x, "y": rec.y,
         "sx": rec.s_x, "sy": rec.s_y, "cumx": rec.cum_x},
        separators=(",", ":"),
    )


def header_line(session: SessionRecord) -> str:
    return json.dumps(_header_dict(session), separators=(",", ":"))


def dump_session(session: SessionRecord) -> str:
    lines = [header_line(session)]
    lines.extend(round_line(rec) for rec in session.rounds_log)
    return "\n".join(lines) + "\n"


def parse_round_line(line: str) -> RoundRecord:
    obj = json.loads(line)
    return RoundRecord(
        round=obj["round"], x=obj["x"], y=obj["y"],
        s_x=obj["sx"], s_y=obj["sy"], cum_x=obj["cumx"],
    )


def load_session(text: str, tolerate_torn_tail: bool = False) -> SessionRecord:
    """Parse a line-delimited session log.

    `tolerate_torn_tail` drops a final line that fails to parse (a write cut
    short by a crash); any earlier bad line raises LogParseError with its
    line number.
    """
    lines = text.splitlines()
    if not lines:
        raise LogParseError(1, "empty log")
    try:
        session = _session_from_header(json.loads(lines[0]))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise LogParseError(1, f"bad header: {exc}") from exc
    expected = 1
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = parse_round_line(line)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            if tolerate_torn_tail and i == len(lines):
                break
            raise LogParseError(i, f"bad round line: {exc}") from exc
        if rec.round != expected:
            raise LogParseError(i, f"expected round {expected}, found {rec.round}")
        session.rounds_log.append(rec)
        expected += 1
    return session


def save_session_file(session: SessionRecord, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_session(session))


def load_session_file(path, tolerate_torn_tail: bool = False) -> SessionRecord:
    with open(path, "r", encoding="utf-8") as f:
        return load_session(f.read(), tolerate_torn_tail=tolerate_torn_tail)

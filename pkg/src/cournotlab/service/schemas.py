"""Wire formats of the experiment HTTP API.

Quantities travel as decimal strings with exactly two fractional digits;
profits carry both the two-digit display string and a full-precision float.
Errors are always {code, message, detail}.
"""

from decimal import Decimal, InvalidOperation
from typing import Optional, Union

from pydantic import BaseModel, Field, field_validator

from ..engine import GameConfig, RoundRecord, SessionRecord, round_half_up


def fmt2(value: float) -> str:
    return f"{round_half_up(value, 2):.2f}"


class SessionCreateRequest(BaseModel):
    k: Optional[float] = None
    rounds: Optional[int] = None
    rounding: Optional[int] = None

    def overrides(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class ConfigView(BaseModel):
    k: float
    s_n: float
    clamp: str
    rounds: int
    rounding: int
    x_bounds: list[float]
    y_bounds: list[float]

    @classmethod
    def from_config(cls, cfg: GameConfig) -> "ConfigView":
        return cls(
            k=cfg.extortion.k,
            s_n=cfg.extortion.s_n,
            clamp=cfg.extortion.clamp,
            rounds=cfg.rounds,
            rounding=cfg.rounding,
            x_bounds=list(cfg.market.x_bounds),
            y_bounds=list(cfg.market.y_bounds),
        )


class SessionCreateResponse(BaseModel):
    session_id: str
    config: ConfigView


class RoundSubmitRequest(BaseModel):
    round: int = Field(ge=1)
    x: Union[str, float]

    @field_validator("x")
    @classmethod
    def _parse_quantity(cls, v):
        if isinstance(v, str):
            try:
                return float(Decimal(v))
            except InvalidOperation as exc:
                raise ValueError(f"not a decimal quantity: {v!r}") from exc
        return float(v)


class RoundView(BaseModel):
    round: int
    x: str
    y: str
    sx: str
    sy: str
    cumx: str
    sx_full: float
    sy_full: float
    cumx_full: float

    @classmethod
    def from_record(cls, rec: RoundRecord) -> "RoundView":
        return cls(
            round=rec.round,
            x=fmt2(rec.x),
            y=fmt2(rec.y),
            sx=fmt2(rec.s_x),
            sy=fmt2(rec.s_y),
            cumx=fmt2(rec.cum_x),
            sx_full=rec.s_x,
            sy_full=rec.s_y,
            cumx_full=rec.cum_x,
        )


class HistoryResponse(BaseModel):
    session_id: str
    status: str
    rounds_played: int
    next_round: int
    cum_x: str
    cum_x_full: float
    records: list[RoundView]

    @classmethod
    def build(cls, session: SessionRecord, records, totals: dict) -> "HistoryResponse":
        return cls(
            session_id=session.session_id,
            status=totals["status"],
            rounds_played=totals["rounds_played"],
            next_round=totals["next_round"],
            cum_x=fmt2(totals["cum_x"]),
            cum_x_full=totals["cum_x"],
            records=[RoundView.from_record(r) for r in records],
        )


class FinishResponse(BaseModel):
    session_id: str
    status: str
    rounds_played: int
    cum_x: str
    cum_x_full: float
    payout_yuan: str
    payout_yuan_full: float


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Optional[dict] = None

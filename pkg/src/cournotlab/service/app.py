"""HTTP front of the experiment server.

POST /sessions                -> create a session from the template
POST /sessions/{id}/rounds    -> submit {round, x}, returns the full record
GET  /sessions/{id}/history   -> most recent rounds, newest first, plus totals
POST /sessions/{id}/finish    -> close out and convert the score to cash
GET  /healthz
"""

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import (
    DomainError,
    RejectedDecision,
    RoundConflict,
    SessionClosed,
    SessionNotFound,
)
from .config import ServiceConfig, validate_at_startup
from .schemas import (
    FinishResponse,
    HistoryResponse,
    RoundSubmitRequest,
    RoundView,
    SessionCreateRequest,
    SessionCreateResponse,
    ConfigView,
    fmt2,
)
from .store import SessionStore


def _error(status: int, code: str, message: str, detail: dict | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    validate_at_startup(config)
    app = FastAPI(title="cournotlab experiment service")
    # the browser client may be served from any static host in the lab
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )
    store = SessionStore(config)
    app.state.store = store
    app.state.config = config

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "validation", "request failed validation", {"errors": exc.errors()})

    @app.exception_handler(DomainError)
    async def _domain_handler(request: Request, exc: DomainError):
        return _error(400, "invalid_config", str(exc))

    @app.exception_handler(SessionNotFound)
    async def _not_found_handler(request: Request, exc: SessionNotFound):
        return _error(404, "not_found", f"unknown session {exc.args[0]}")

    @app.exception_handler(RejectedDecision)
    async def _rejected_handler(request: Request, exc: RejectedDecision):
        return _error(422, "rejected_decision", str(exc))

    @app.exception_handler(SessionClosed)
    async def _closed_handler(request: Request, exc: SessionClosed):
        return _error(409, "session_closed", str(exc))

    @app.exception_handler(RoundConflict)
    async def _conflict_handler(request: Request, exc: RoundConflict):
        detail = {"expected_round": exc.expected}
        if exc.existing is not None:
            detail["record"] = RoundView.from_record(exc.existing).model_dump()
        return _error(409, "conflict", str(exc), detail)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=SessionCreateResponse, status_code=201)
    def create_session(body: SessionCreateRequest | None = None):
        overrides = body.overrides() if body is not None else {}
        record = store.create(overrides)
        return SessionCreateResponse(
            session_id=record.session_id,
            config=ConfigView.from_config(record.config),
        )

    @app.post("/sessions/{session_id}/rounds", response_model=RoundView)
    def submit_round(session_id: str, body: RoundSubmitRequest):
        rec = store.submit(session_id, body.round, body.x)
        return RoundView.from_record(rec)

    @app.get("/sessions/{session_id}/history", response_model=HistoryResponse)
    def get_history(session_id: str, n: int = 10):
        records, totals = store.history(session_id, n)
        session = store.get(session_id)
        return HistoryResponse.build(session, records, totals)

    @app.post("/sessions/{session_id}/finish", response_model=FinishResponse)
    def finish_session(session_id: str):
        summary = store.finish(session_id)
        return FinishResponse(
            session_id=summary["session_id"],
            status=summary["status"],
            rounds_played=summary["rounds_played"],
            cum_x=fmt2(summary["cum_x"]),
            cum_x_full=summary["cum_x"],
            payout_yuan=fmt2(summary["payout_yuan"]),
            payout_yuan_full=summary["payout_yuan"],
        )

    return app

"""Durable session storage: one append-only log per session plus a small index.

Every acknowledged round is flushed and fsynced to the session's log file
before the caller sees it, so a crash loses at most an unacknowledged write
(a torn final line is dropped on recovery). Mutations of one session are
serialized through its own lock; distinct sessions proceed in parallel.
"""

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .. import engine
from ..engine import GameConfig, SessionRecord, header_line, round_line
from ..errors import DomainError, RoundConflict, SessionClosed, SessionNotFound
from ..extortion import ExtortionConfig
from ..metrics import payout_yuan
from .config import ServiceConfig

INDEX_FILE = "sessions.json"


@dataclass
class _LiveSession:
    record: SessionRecord
    lock: threading.Lock
    log_path: Path
    last_activity: float
    handle: object = None  # append-mode file handle


class SessionStore:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._sessions: dict[str, _LiveSession] = {}
        self._recover()

    # -- lifecycle -------------------------------------------------------------

    def create(self, overrides: dict | None = None) -> SessionRecord:
        cfg = self._config_with(overrides or {})
        session_id = secrets.token_urlsafe(12)
        record = SessionRecord(session_id=session_id, config=cfg, agent="human", seed=0)
        log_path = self.data_dir / f"{session_id}.jsonl"
        handle = open(log_path, "a", encoding="utf-8")
        self._append(handle, header_line(record))
        live = _LiveSession(
            record=record,
            lock=threading.Lock(),
            log_path=log_path,
            last_activity=time.monotonic(),
            handle=handle,
        )
        with self._registry_lock:
            self._sessions[session_id] = live
            self._write_index_locked()
        return record

    def submit(self, session_id: str, round_no: int, x: float):
        live = self._get(session_id)
        with live.lock:
            self._check_idle(live)
            record = live.record
            if record.status != "active":
                raise SessionClosed(f"session {session_id} is {record.status}")
            expected = len(record.rounds_log) + 1
            if round_no < 1 or round_no > record.config.rounds:
                raise RoundConflict(expected)
            if round_no < expected:
                return_existing = record.rounds_log[round_no - 1]
                raise RoundConflict(expected, existing=return_existing)
            if round_no > expected:
                raise RoundConflict(expected)
            rec = engine.step(record, x)
            self._append(live.handle, round_line(rec))
            live.last_activity = time.monotonic()
            if record.status != "active":
                self._persist_status(session_id, record.status)
            return rec

    def history(self, session_id: str, last_n: int = 10):
        live = self._get(session_id)
        with live.lock:
            record = live.record
            recent = list(reversed(record.rounds_log[-last_n:])) if last_n > 0 else []
            cum = record.rounds_log[-1].cum_x if record.rounds_log else 0.0
            return recent, {
                "rounds_played": len(record.rounds_log),
                "next_round": len(record.rounds_log) + 1,
                "cum_x": cum,
                "status": record.status,
            }

    def finish(self, session_id: str) -> dict:
        live = self._get(session_id)
        with live.lock:
            record = live.record
            if record.status == "active":
                record.status = "finished"
                self._persist_status(session_id, "finished")
            elif record.status == "abandoned":
                record.status = "finished"
                self._persist_status(session_id, "finished")
            cum = record.rounds_log[-1].cum_x if record.rounds_log else 0.0
            payout = payout_yuan(max(cum, 0.0))
            if self.config.clamp_negative_payout:
                payout = max(payout, 0.0)
            return {
                "session_id": session_id,
                "status": record.status,
                "rounds_played": len(record.rounds_log),
                "cum_x": cum,
                "payout_yuan": payout,
            }

    def get(self, session_id: str) -> SessionRecord:
        return self._get(session_id).record

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def close(self) -> None:
        with self._registry_lock:
            for live in self._sessions.values():
                if live.handle is not None:
                    live.handle.close()
                    live.handle = None

    # -- internals ---------------------------------------------------------------

    def _config_with(self, overrides: dict) -> GameConfig:
        tmpl = self.config.template
        known = {"k", "rounds", "rounding"}
        unknown = set(overrides) - known
        if unknown:
            raise DomainError(f"unknown session overrides: {sorted(unknown)}")
        ext = tmpl.extortion
        if "k" in overrides:
            k = float(overrides["k"])
            if not (self.config.k_min <= k <= self.config.k_max):
                raise DomainError(
                    f"k={k} outside configured bounds [{self.config.k_min}, {self.config.k_max}]"
                )
            ext = ExtortionConfig(k=k, s_n=ext.s_n, root=ext.root, clamp=ext.clamp)
        return replace(
            tmpl,
            extortion=ext,
            rounds=int(overrides.get("rounds", tmpl.rounds)),
            rounding=int(overrides.get("rounding", tmpl.rounding)),
        )

    def _get(self, session_id: str) -> _LiveSession:
        with self._registry_lock:
            live = self._sessions.get(session_id)
        if live is None:
            raise SessionNotFound(session_id)
        return live

    def _check_idle(self, live: _LiveSession) -> None:
        if live.record.status != "active":
            return
        if time.monotonic() - live.last_activity > self.config.idle_timeout_s:
            live.record.status = "abandoned"
            self._persist_status(live.record.session_id, "abandoned")

    @staticmethod
    def _append(handle, line: str) -> None:
        handle.write(line + "\n")
        handle.flush()
        os.fsync(handle.fileno())

    def _index_path(self) -> Path:
        return self.data_dir / INDEX_FILE

    def _write_index_locked(self) -> None:
        index = {
            sid: {"status": live.record.status}
            for sid, live in self._sessions.items()
        }
        tmp = self._index_path().with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(index, f)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, self._index_path())

    def _persist_status(self, session_id: str, status: str) -> None:
        with self._registry_lock:
            self._write_index_locked()

    def _recover(self) -> None:
        index = {}
        if self._index_path().exists():
            with open(self._index_path(), "r", encoding="utf-8") as f:
                index = json.load(f)
        for path in sorted(self.data_dir.glob("*.jsonl")):
            record = self._load_truncating_torn_tail(path)
            if record is None:
                continue
            entry = index.get(record.session_id)
            if entry:
                record.status = entry["status"]
            if record.status == "active" and len(record.rounds_log) >= record.config.rounds:
                record.status = "finished"
            handle = open(path, "a", encoding="utf-8")
            self._sessions[record.session_id] = _LiveSession(
                record=record,
                lock=threading.Lock(),
                log_path=path,
                last_activity=time.monotonic(),
                handle=handle,
            )
        with self._registry_lock:
            self._write_index_locked()

    @staticmethod
    def _load_truncating_torn_tail(path: Path):
        """Load a session log, physically dropping a write cut short by a crash.

        Returns None for a log whose header never made it to disk intact.
        """
        text = path.read_text(encoding="utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            return None
        try:
            record = engine.load_session(lines[0] + "\n")
        except Exception:
            path.rename(path.with_suffix(".corrupt"))
            return None
        kept = 1
        for line in lines[1:]:
            try:
                rec = engine.parse_round_line(line)
            except Exception:
                break
            if rec.round != len(record.rounds_log) + 1:
                break
            record.rounds_log.append(rec)
            kept += 1
        good = "\n".join(lines[:kept]) + "\n"
        if good != text:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(good, encoding="utf-8")
            os.replace(tmp, path)
        return record

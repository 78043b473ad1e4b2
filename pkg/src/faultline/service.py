"""HTTP session service for interactive, feedback-driven localization.

Each session is a serialized state machine: initial query -> top-10 ->
feedback rounds (bounded by max_cycles) -> succeeded or exhausted.
Sessions persist in an embedded sqlite key-value file so a restart keeps
active sessions; corpora, the ranking model and the provider are shared
immutable. Errors are JSON {code, message, retriable}.
"""

import json
import sqlite3
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import FaultlineError, ProviderError
from .features import FixHistory, extract_features_all
from .llm import LlmProvider
from .query import (DEFAULT_MAX_CYCLES, Feedback, MAX_CYCLES_CAP, Provenance,
                    Query, QuerySession, ShotMode)
from .ranker import RankingModel, rank
from .reports import BugReport, Category, parse_timestamp

TOP_SLICE = 10


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str,
                 retriable: bool = False):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.retriable = retriable


class ReportPayload(BaseModel):
    report_id: str | None = None
    title: str = ""
    description: str = ""
    created_at: str | None = None
    fixed_files: list[str] = Field(default_factory=list)
    max_cycles: int | None = None


class FeedbackPayload(BaseModel):
    kind: str
    class_name: str


class ConfirmPayload(BaseModel):
    file_id: str


class SessionStore:
    """sqlite-backed key-value store: session_id -> JSON state blob."""

    def __init__(self, path):
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS sessions (id TEXT PRIMARY KEY, data TEXT)")
        self._conn.commit()

    def get(self, session_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM sessions WHERE id = ?", (session_id,)).fetchone()
        return json.loads(row[0]) if row else None

    def put(self, session_id: str, state: dict) -> None:
        blob = json.dumps(state)
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO sessions (id, data) VALUES (?, ?)",
                (session_id, blob))
            self._conn.commit()


def _view(state: dict) -> dict:
    """Client-facing projection of a stored session."""
    latest = state["history"][-1]
    return {
        "session_id": state["session_id"],
        "project": state["project"],
        "version": state["version"],
        "report_id": state["report"]["report_id"],
        "status": state["status"],
        "cycle": state["cycle"],
        "max_cycles": state["max_cycles"],
        "category": state["category"],
        "query": latest["query"],
        "top10": latest["top10"],
        "excluded": state["excluded"],
        "confirmed_file": state.get("confirmed_file"),
        "history": state["history"],
    }


def _query_dict(query: Query) -> dict:
    return {
        "entities": list(query.entities),
        "category": query.category.value,
        "cycle": query.cycle,
        "provenance": query.provenance.value,
        "fallback": query.fallback,
    }


def create_app(corpora: dict, model: RankingModel, provider: LlmProvider,
               store_path=None, max_cycles: int = DEFAULT_MAX_CYCLES,
               shot_mode: ShotMode = ShotMode.ONE_SHOT,
               static_dir=None) -> FastAPI:
    app = FastAPI(title="faultline session service")
    store = SessionStore(store_path or ":memory:")
    session_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()
    empty_history = FixHistory([])

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message,
                     "retriable": exc.retriable})

    def load_state(session_id: str) -> dict:
        state = store.get(session_id)
        if state is None:
            raise ApiError(404, "unknown_session",
                           f"no session {session_id!r}")
        return state

    def report_from_payload(payload: ReportPayload, project, version) -> BugReport:
        created = payload.created_at or datetime.now(timezone.utc).isoformat()
        try:
            created_at = parse_timestamp(created)
        except FaultlineError as exc:
            raise ApiError(400, "validation", str(exc))
        return BugReport(
            report_id=payload.report_id or f"live-{uuid.uuid4().hex[:8]}",
            project=project,
            version=version,
            title=payload.title,
            description=payload.description,
            created_at=created_at,
            fixed_files=tuple(payload.fixed_files),
        )

    def rank_slice(report: BugReport, query: Query, bundle) -> list:
        features = extract_features_all(report, query, bundle, empty_history)
        ranked = rank(model, query.category, features)
        return [{"rank": i, "file_id": fid, "score": score}
                for i, (fid, score) in enumerate(ranked[:TOP_SLICE], 1)]

    def resume_engine(state: dict, bundle) -> QuerySession:
        report = _report_from_state(state)
        engine = QuerySession(report, provider, bundle, shot_mode=shot_mode,
                              max_cycles=state["max_cycles"])
        engine.conversation = [dict(m) for m in state["conversation"]]
        engine.excluded = set(state["excluded"])
        q = state["history"][-1]["query"]
        engine.query = Query(
            entities=tuple(q["entities"]),
            category=Category(q["category"]),
            cycle=q["cycle"],
            provenance=Provenance(q["provenance"]),
            fallback=q["fallback"],
        )
        return engine

    def _report_from_state(state: dict) -> BugReport:
        r = state["report"]
        return BugReport(
            report_id=r["report_id"],
            project=state["project"],
            version=state["version"],
            title=r["title"],
            description=r["description"],
            created_at=parse_timestamp(r["created_at"]),
            fixed_files=tuple(r["fixed_files"]),
        )

    @app.get("/api/health")
    async def health():
        return {"status": "ok",
                "corpora": sorted(f"{p}@{v}" for p, v in corpora)}

    @app.post("/api/projects/{project}/versions/{version}/sessions",
              status_code=201)
    def create_session(project: str, version: str, payload: ReportPayload):
        if (project, version) not in corpora:
            raise ApiError(404, "unknown_corpus",
                           f"no corpus for {project}@{version}")
        bundle = corpora[(project, version)]
        limit = payload.max_cycles if payload.max_cycles is not None else max_cycles
        if not 1 <= limit <= MAX_CYCLES_CAP:
            raise ApiError(400, "validation",
                           f"max_cycles must be in 1..{MAX_CYCLES_CAP}")
        report = report_from_payload(payload, project, version)
        engine = QuerySession(report, provider, bundle, shot_mode=shot_mode,
                              max_cycles=limit)
        try:
            query = engine.initial_query()
        except ProviderError as exc:
            raise ApiError(502, "provider_error", str(exc),
                           retriable=exc.retriable)
        top10 = rank_slice(report, query, bundle)
        state = {
            "session_id": uuid.uuid4().hex,
            "project": project,
            "version": version,
            "report": {
                "report_id": report.report_id,
                "title": report.title,
                "description": report.description,
                "created_at": report.created_at.isoformat(),
                "fixed_files": list(report.fixed_files),
            },
            "category": engine.category.value,
            "status": "active",
            "cycle": 0,
            "max_cycles": limit,
            "excluded": [],
            "conversation": engine.conversation,
            "confirmed_file": None,
            "history": [{"query": _query_dict(query), "top10": top10,
                         "feedback": []}],
        }
        store.put(state["session_id"], state)
        return _view(state)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _view(load_state(session_id))

    @app.post("/api/sessions/{session_id}/feedback")
    def submit_feedback(session_id: str, feedback: list[FeedbackPayload]):
        lock = session_lock(session_id)
        if not lock.acquire(blocking=False):
            raise ApiError(409, "conflict",
                           "another update for this session is in flight",
                           retriable=True)
        try:
            state = load_state(session_id)
            if state["status"] != "active":
                raise ApiError(409, "conflict",
                               f"session is {state['status']}")
            if not feedback:
                raise ApiError(400, "validation", "feedback list is empty")
            items = []
            for fb in feedback:
                if fb.kind not in Feedback.KINDS:
                    raise ApiError(400, "validation",
                                   f"unknown feedback kind {fb.kind!r}")
                if not fb.class_name.strip():
                    raise ApiError(400, "validation", "class_name is empty")
                items.append(Feedback(kind=fb.kind,
                                      class_name=fb.class_name.strip()))
            bundle = corpora[(state["project"], state["version"])]
            engine = resume_engine(state, bundle)
            try:
                query = engine.reformulate(items)
            except ProviderError as exc:
                raise ApiError(502, "provider_error", str(exc),
                               retriable=exc.retriable)
            except FaultlineError as exc:
                raise ApiError(400, "validation", str(exc))
            report = _report_from_state(state)
            top10 = rank_slice(report, query, bundle)
            state["cycle"] = query.cycle
            state["excluded"] = sorted(engine.excluded)
            state["conversation"] = engine.conversation
            state["history"].append({
                "query": _query_dict(query),
                "top10": top10,
                "feedback": [{"kind": f.kind, "class_name": f.class_name}
                             for f in items],
            })
            fixed = set(state["report"]["fixed_files"])
            in_slice = {row["file_id"] for row in top10}
            if fixed and fixed & in_slice:
                # Evaluation mode: ground truth is known, success is automatic.
                state["status"] = "succeeded"
                state["confirmed_file"] = sorted(fixed & in_slice)[0]
            elif query.cycle >= state["max_cycles"]:
                state["status"] = "exhausted"
            store.put(session_id, state)
            return _view(state)
        finally:
            lock.release()

    @app.post("/api/sessions/{session_id}/confirm")
    def confirm_success(session_id: str, payload: ConfirmPayload):
        lock = session_lock(session_id)
        if not lock.acquire(blocking=False):
            raise ApiError(409, "conflict",
                           "another update for this session is in flight",
                           retriable=True)
        try:
            state = load_state(session_id)
            if state["status"] == "succeeded":
                raise ApiError(409, "conflict", "session already succeeded")
            latest = {row["file_id"] for row in state["history"][-1]["top10"]}
            if payload.file_id not in latest:
                raise ApiError(400, "validation",
                               f"{payload.file_id!r} is not in the latest top-10")
            state["status"] = "succeeded"
            state["confirmed_file"] = payload.file_id
            store.put(session_id, state)
            return _view(state)
        finally:
            lock.release()

    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app

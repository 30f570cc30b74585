"""HTTP facade over sessions: create, edit, poll, suggest, accept, log.

All state is in memory, keyed by session id.  On end a session's final
model (.dm) and log (.csv) can be persisted to a directory.  Errors map
to stable JSON bodies: 404 unknown session/candidate, 409 wrong mode or
ended session, 422 invalid input or model-state violation, 502 provider
trouble.
"""

from __future__ import annotations

import logging
import threading
import uuid
from datetime import datetime
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .catalog import ShotCatalog, load_catalog
from .dsl import model_to_dict, parse_model, serialize_model
from .errors import (
    ModelMateError,
    ProviderError,
    SessionEnded,
    UnknownCandidate,
    UnknownSession,
    WrongMode,
)
from .gateway import Gateway
from .model import Model
from .recommend import RecommenderConfig
from .session import EditOp, Mode, Session, mode_from_string
from .sessionlog import format_records

log = logging.getLogger(__name__)


class CreateSessionBody(BaseModel):
    modelSource: str | None = None
    mode: str = "NoAssistance"
    packageName: str | None = None
    seed: int | None = None


class EditBody(BaseModel):
    kind: str
    name: str | None = None
    className: str | None = None
    typeName: str = "String"
    source: str | None = None
    target: str | None = None
    associationKind: str = "association"
    label: str | None = None


class ModeBody(BaseModel):
    mode: str


class SuggestBody(BaseModel):
    kinds: list[str] | None = None


def _http_status(err: ModelMateError) -> int:
    if isinstance(err, (UnknownCandidate, UnknownSession)):
        return 404
    if isinstance(err, (WrongMode, SessionEnded)):
        return 409
    if isinstance(err, ProviderError) or err.code == "mock-miss":
        return 502
    return 422


def create_app(
    gateway: Gateway,
    catalog: ShotCatalog | None = None,
    config: RecommenderConfig | None = None,
    debounce_seconds: float = 0.5,
    persist_dir: str | Path | None = None,
    clock: Callable[[], datetime] = datetime.now,
    static_dir: str | Path | None = None,
) -> FastAPI:
    catalog = catalog if catalog is not None else load_catalog()
    config = config if config is not None else RecommenderConfig()
    app = FastAPI(title="modelmate", version="0.1.0")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    @app.exception_handler(ModelMateError)
    async def handle_package_error(request: Request, err: ModelMateError):
        status = _http_status(err)
        body = {"error": {"code": err.code, "message": str(err), "httpStatus": status}}
        return JSONResponse(body, status_code=status)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, err: ValueError):
        body = {"error": {"code": "invalid-value", "message": str(err), "httpStatus": 422}}
        return JSONResponse(body, status_code=422)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.modelSource is not None:
            model = parse_model(body.modelSource)
        else:
            model = Model(body.packageName or "Model")
        session = Session(
            model,
            catalog,
            gateway,
            config=config,
            mode=mode_from_string(body.mode),
            clock=clock,
            debounce_seconds=debounce_seconds,
            seed=body.seed,
        )
        session_id = uuid.uuid4().hex[:12]
        with registry_lock:
            sessions[session_id] = session
        return {
            "sessionId": session_id,
            "revision": session.revision,
            "mode": session.mode.value,
            "model": model_to_dict(session.model),
        }

    @app.get("/sessions/{session_id}/model")
    def get_model(session_id: str, sinceRevision: int | None = None):
        session = get_session(session_id)
        if sinceRevision is not None and session.revision <= sinceRevision:
            return Response(status_code=204)
        return {
            "revision": session.revision,
            "mode": session.mode.value,
            "ended": session.ended,
            "model": model_to_dict(session.model),
        }

    @app.post("/sessions/{session_id}/edits")
    def post_edit(session_id: str, body: EditBody):
        session = get_session(session_id)
        op = EditOp(
            kind=body.kind,
            name=body.name,
            class_name=body.className,
            type_name=body.typeName,
            source=body.source,
            target=body.target,
            association_kind=body.associationKind,
            label=body.label,
        )
        revision = session.apply_edit(op)
        return {"revision": revision}

    @app.get("/sessions/{session_id}/suggestions")
    def get_suggestions(session_id: str):
        session = get_session(session_id)
        payload = session.suggestions().to_dict()
        payload["revision"] = session.revision
        return payload

    @app.post("/sessions/{session_id}/suggestions/request")
    def request_suggestions(session_id: str, body: SuggestBody | None = None):
        session = get_session(session_id)
        kinds = set(body.kinds) if body and body.kinds else None
        payload = session.request_suggestions(kinds).to_dict()
        payload["revision"] = session.revision
        return payload

    @app.post("/sessions/{session_id}/suggestions/{candidate_id}/accept")
    def accept_candidate(session_id: str, candidate_id: str):
        session = get_session(session_id)
        revision = session.accept(candidate_id)
        return {"revision": revision}

    @app.post("/sessions/{session_id}/suggestions/{candidate_id}/dismiss")
    def dismiss_candidate(session_id: str, candidate_id: str):
        session = get_session(session_id)
        revision = session.dismiss(candidate_id)
        return {"revision": revision}

    @app.post("/sessions/{session_id}/mode")
    def set_mode(session_id: str, body: ModeBody):
        session = get_session(session_id)
        revision = session.set_mode(mode_from_string(body.mode))
        return {"revision": revision, "mode": session.mode.value}

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        session = get_session(session_id)
        payload = session.finalize().to_dict()
        payload["revision"] = session.revision
        return payload

    @app.post("/sessions/{session_id}/end")
    def end_session(session_id: str):
        session = get_session(session_id)
        revision = session.end()
        if persist_dir is not None:
            target = Path(persist_dir)
            target.mkdir(parents=True, exist_ok=True)
            (target / f"{session_id}.dm").write_text(
                serialize_model(session.model), encoding="utf-8"
            )
            (target / f"{session_id}.csv").write_text(
                format_records(session.records), encoding="utf-8"
            )
        return {"revision": revision, "ended": True}

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str):
        session = get_session(session_id)
        return PlainTextResponse(format_records(session.records), media_type="text/csv")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app

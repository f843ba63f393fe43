"""REST service for the four-stage flow (review, select, generate, filter).

All payloads are JSON under /v1; errors use the body
{"code": ..., "message": ..., "details": ...}. Model checkpoints are
immutable shared state; per-session mutations are serialized by the
session manager.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .annotators import Annotator, HeuristicAnnotator, HttpAnnotator
from .answerability import load_filter_checkpoint
from .config import ServiceConfig
from .errors import (AnnotatorUnavailable, EmptyInput, EmptySpan, InvalidSpan,
                     ModelUnavailable, OverlappingEdits, PivotQGError,
                     RangeOutOfBounds, UnknownFormat, UnresolvedFlags)
from .qg_train import load_checkpoint
from .sessions import SessionManager, SessionNotFound
from .store import SessionStore

_STATUS_BY_ERROR: list[tuple[type[Exception], int]] = [
    (SessionNotFound, 404),
    (EmptyInput, 400),
    (OverlappingEdits, 409),
    (UnresolvedFlags, 409),
    (RangeOutOfBounds, 422),
    (EmptySpan, 422),
    (InvalidSpan, 422),
    (UnknownFormat, 422),
    (AnnotatorUnavailable, 502),
    (ModelUnavailable, 503),
]


class CreateSessionBody(BaseModel):
    text: str = ""


class EditSpec(BaseModel):
    start: int
    end: int
    replacement: str = ""


class EditTextBody(BaseModel):
    edits: list[EditSpec]


class SpanSpec(BaseModel):
    id: str | None = None
    start: int | None = None
    end: int | None = None


class GenerateBody(BaseModel):
    spans: list[SpanSpec]


class KnobsBody(BaseModel):
    intra: float = Field(ge=0.0, le=1.0)
    inter: float = Field(ge=0.0, le=1.0)


class EditRecordBody(BaseModel):
    text: str


def build_manager(config: ServiceConfig) -> SessionManager:
    annotator: Annotator
    if config.annotator_url:
        annotator = HttpAnnotator(config.annotator_url)
    else:
        annotator = HeuristicAnnotator()
    qg_model = None
    if config.qg_checkpoint:
        qg_model = load_checkpoint(config.qg_checkpoint)
    filter_model = None
    threshold = config.filter_threshold
    if config.filter_checkpoint:
        filter_model, saved_threshold = load_filter_checkpoint(
            config.filter_checkpoint)
        if saved_threshold is not None and config.filter_threshold == 0.0:
            threshold = saved_threshold
    return SessionManager(
        store=SessionStore(config.db_path),
        annotator=annotator,
        qg_model=qg_model,
        filter_model=filter_model,
        filter_threshold=threshold,
        beam_width=config.beam_width,
        default_knobs=(config.intra_threshold, config.inter_threshold),
    )


def create_app(config: ServiceConfig | None = None,
               manager: SessionManager | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if manager is None:
        manager = build_manager(config)

    app = FastAPI(title="pivotqg", version="0.1.0")
    app.state.manager = manager

    @app.exception_handler(PivotQGError)
    async def _domain_error(request: Request, exc: PivotQGError):
        status = 500
        for err_type, code in _STATUS_BY_ERROR:
            if isinstance(exc, err_type):
                status = code
                break
        return JSONResponse(status_code=status, content={
            "code": type(exc).__name__,
            "message": str(exc),
            "details": {},
        })

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={
            "code": "ValidationError", "message": str(exc), "details": {}})

    def _session_payload(session: dict) -> dict:
        return {
            "session_id": session["id"],
            "text": session["text"],
            "flags": session["flags"],
            "paragraph": session["paragraph"],
            "knobs": session["knobs"],
            "selected_spans": session["selected_spans"],
            "facets": manager.facet_view(session),
            "filtered_out": len(session["filtered_out"]),
            "created": session["created"],
            "updated": session["updated"],
        }

    @app.get("/v1/health")
    def health():
        return {
            "status": "ok",
            "generator_loaded": manager.qg_model is not None,
            "filter_loaded": manager.filter_model is not None,
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = manager.create(body.text)
        return {"session_id": session["id"], "flags": session["flags"]}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_payload(manager.get(session_id))

    @app.patch("/v1/sessions/{session_id}/text")
    def edit_text(session_id: str, body: EditTextBody):
        edits = [((e.start, e.end), e.replacement) for e in body.edits]
        session = manager.edit_text(session_id, edits)
        return {"flags": session["flags"], "text": session["text"]}

    @app.get("/v1/sessions/{session_id}/candidates")
    def candidates(session_id: str, kind: str = "named_entity"):
        if kind not in ("named_entity", "noun_phrase"):
            raise InvalidSpan(f"unknown candidate kind {kind!r}")
        return {"candidates": manager.candidates(session_id, kind)}

    @app.post("/v1/sessions/{session_id}/generate")
    def generate(session_id: str, body: GenerateBody):
        specs = [s.model_dump() for s in body.spans]
        session = manager.generate(session_id, specs)
        return {
            "facets": manager.facet_view(session),
            "filtered_out": len(session["filtered_out"]),
        }

    @app.get("/v1/sessions/{session_id}/filtered")
    def filtered(session_id: str):
        session = manager.get(session_id)
        return {"filtered_out": session["filtered_out"]}

    @app.get("/v1/sessions/{session_id}/questions/{question_id}/attention")
    def attention(session_id: str, question_id: str):
        return manager.attention(session_id, question_id)

    @app.put("/v1/sessions/{session_id}/questions/{question_id}")
    def edit_question(session_id: str, question_id: str, body: EditRecordBody):
        history = manager.edit_record(session_id, "questions", question_id,
                                      body.text)
        return {"history": history}

    @app.get("/v1/sessions/{session_id}/questions/{question_id}/history")
    def question_history(session_id: str, question_id: str):
        return {"history": manager.history(session_id, "questions",
                                           question_id)}

    @app.put("/v1/sessions/{session_id}/answers/{answer_id}")
    def edit_answer(session_id: str, answer_id: str, body: EditRecordBody):
        history = manager.edit_record(session_id, "answers", answer_id,
                                      body.text)
        return {"history": history}

    @app.get("/v1/sessions/{session_id}/answers/{answer_id}/history")
    def answer_history(session_id: str, answer_id: str):
        return {"history": manager.history(session_id, "answers", answer_id)}

    @app.put("/v1/sessions/{session_id}/knobs")
    def set_knobs(session_id: str, body: KnobsBody):
        session = manager.set_knobs(session_id, body.intra, body.inter)
        return {"knobs": session["knobs"],
                "facets": manager.facet_view(session)}

    @app.get("/v1/sessions/{session_id}/export")
    def export(session_id: str, format: str = "json"):
        document = manager.export(session_id, format)
        if format == "text":
            return PlainTextResponse(document)
        return document

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="static")

    return app

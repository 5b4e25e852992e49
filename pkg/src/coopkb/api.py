"""HTTP facade over the knowledge base.

Every mutating endpoint is exactly one library operation, no extra
semantics. Errors map to a fixed table; the admission outcomes
``needs_connection`` and ``conflict_detected`` come back as 422 with the
full admission result so a client can drive the refine-or-connect loop.
Every response carries the journal position its snapshot reflects.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    AmbiguousName,
    BadIdentifier,
    CycleDetected,
    DanglingConnection,
    DuplicateId,
    DuplicateUser,
    InvalidPayload,
    KbError,
    NoAttachment,
    OutOfRange,
    SignatureViolation,
    UnknownObject,
    UnknownUser,
)
from .fl.linter import lint_text
from .kb import KnowledgeBase
from .model import Dimension, Modality, Source
from .protocol import AdmissionOutcome
from .query import object_detail, run_query
from .valuation import ALL_FEATURES, FilterCriteria, filter_objects

STATUS_BY_CODE = {
    BadIdentifier.code: 400,
    OutOfRange.code: 400,
    SignatureViolation.code: 400,
    NoAttachment.code: 400,
    CycleDetected.code: 400,
    DanglingConnection.code: 400,
    InvalidPayload.code: 400,
    UnknownObject.code: 404,
    UnknownUser.code: 404,
    DuplicateUser.code: 409,
    DuplicateId.code: 409,
}


class UserIn(BaseModel):
    name: str
    metadata: dict[str, str] = Field(default_factory=dict)


class LoadIn(BaseModel):
    text: str
    as_user: str
    html: bool = False


class StatementIn(BaseModel):
    user: str
    fl: str | None = None
    informal: str | None = None
    negated: bool = False
    source: dict[str, str] | None = None
    connections: list[list[str]] = Field(default_factory=list)


class RelationIn(BaseModel):
    user: str
    type: str
    src: str
    dst: str
    modality: str = "may"


class BeliefIn(BaseModel):
    user: str
    object: str


class VoteIn(BaseModel):
    voter: str
    object: str
    dimension: str
    value: float


class SyncIn(BaseModel):
    server_id: str = ""
    vector: dict[str, int] = Field(default_factory=dict)
    records: list[dict] = Field(default_factory=list)


def create_app(kb: KnowledgeBase) -> FastAPI:
    app = FastAPI(title="coopkb", version="0.1.0")

    def ok(payload: dict[str, Any], status: int = 200) -> JSONResponse:
        return JSONResponse({"journal_position": kb.journal_position, **payload},
                            status_code=status)

    @app.exception_handler(KbError)
    def kb_error_handler(_: Request, exc: KbError) -> JSONResponse:
        if isinstance(exc, AmbiguousName):
            return ok({"kind": "candidates", "name": exc.name,
                       "candidates": exc.candidates})
        status = STATUS_BY_CODE.get(exc.code, 400)
        return ok({"error": exc.code, "message": exc.message}, status)

    @app.exception_handler(ValueError)
    def value_error_handler(_: Request, exc: ValueError) -> JSONResponse:
        # bad enum values and malformed numbers from clients
        return ok({"error": "invalid_payload", "message": str(exc)}, 400)

    @app.post("/users")
    def post_user(body: UserIn):
        name = kb.register_user(body.name, body.metadata)
        return ok({"user": name}, 201)

    @app.post("/load")
    def post_load(body: LoadIn):
        report = kb.load_fl(body.text, body.as_user, html=body.html)
        return ok({"report": report.to_dict()})

    @app.get("/objects/{object_id:path}")
    def get_object(object_id: str):
        result = object_detail(kb.store, object_id)
        return ok(result.to_dict())

    @app.get("/query")
    def get_query(q: str = Query(...)):
        result = run_query(kb.store, q)
        return ok(result.to_dict())

    @app.post("/statements")
    def post_statement(body: StatementIn):
        stmt_body = _statement_body(kb, body)
        source = Source.from_dict(body.source) if body.source else None
        connections = [(t, obj) for t, obj in body.connections]
        result = kb.propose_statement(body.user, stmt_body, source, connections)
        status = 201 if result.outcome is AdmissionOutcome.ACCEPTED else 422
        return ok({"result": result.to_dict()}, status)

    @app.post("/relations")
    def post_relation(body: RelationIn):
        rel = kb.add_relation(body.user, body.type, body.src, body.dst,
                              Modality(body.modality))
        return ok({"relation": rel.to_dict()}, 201)

    @app.post("/beliefs")
    def post_belief(body: BeliefIn):
        believers = kb.add_belief(body.user, body.object)
        return ok({"object": body.object, "believers": sorted(believers)})

    @app.post("/votes")
    def post_vote(body: VoteIn):
        vote = kb.cast_vote(body.voter, body.object,
                            Dimension(body.dimension), body.value)
        return ok({"vote": vote.to_dict()}, 201)

    @app.get("/filter")
    def get_filter(
        min_usefulness: float | None = None,
        min_originality: float | None = None,
        arguments_without_objections: bool = False,
        creator_key: str | None = None,
        creator_value: str | None = None,
        allow_features: str | None = None,
        most_specialized: bool = False,
    ):
        criteria = FilterCriteria(
            arguments_without_objections=arguments_without_objections,
            most_specialized_only=most_specialized,
        )
        if min_usefulness is not None:
            criteria.min_scores[Dimension.USEFULNESS] = min_usefulness
        if min_originality is not None:
            criteria.min_scores[Dimension.ORIGINALITY] = min_originality
        if creator_key is not None and creator_value is not None:
            criteria.creator_metadata[creator_key] = creator_value
        if allow_features is not None:
            allowed = frozenset(f for f in allow_features.split(",") if f)
            unknown = allowed - ALL_FEATURES
            if unknown:
                raise InvalidPayload(f"unknown features: {', '.join(sorted(unknown))}")
            criteria.allowed_features = allowed
        return ok({"objects": filter_objects(kb.store, criteria)})

    @app.get("/lint")
    def get_lint(text: str = Query(...), html: bool = False):
        diagnostics = lint_text(text, kb.store, html=html)
        return ok({"diagnostics": [
            {"class": d.cls, "line": d.line, "col": d.col,
             "message": d.message, "severity": d.severity}
            for d in diagnostics
        ]})

    @app.post("/sync/digest")
    def post_sync_digest(body: SyncIn):
        delta = kb.delta_for(body.vector)
        return ok({"digest": kb.digest(), "delta": delta})

    @app.post("/sync/delta")
    def post_sync_delta(body: SyncIn):
        stats = kb.ingest(body.records)
        return ok({"ingest": stats})

    return app


def _statement_body(kb: KnowledgeBase, body: StatementIn):
    if (body.fl is None) == (body.informal is None):
        raise InvalidPayload("provide exactly one of 'fl' or 'informal'")
    if body.informal is not None:
        return body.informal
    if body.user not in kb.store.users:
        raise UnknownUser(f"unknown user {body.user!r}")
    return kb.graph_from_fl(body.fl, body.user, negated=body.negated)

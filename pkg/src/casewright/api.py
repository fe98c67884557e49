"""HTTP facade over the engine and store.

Endpoints (JSON bodies; Authorization: Bearer <token>):

    POST /models                          register a model document
    GET  /models                          list model ids
    POST /instances        {model, instanceId?}
    GET  /instances                       list instance ids
    GET  /instances/{id}/{view}           summary|items|milestones|case_file|plannable|history
    POST /instances/{id}/actions    {target, action, payload?}
    POST /instances/{id}/casefile   {op, path, payload?}
    POST /instances/{id}/plan       {scope, entry}
    POST /instances/{id}/clock      {ticks}
    GET  /instances/{id}/events?after=N   server-sent event stream (log lines verbatim)

Mutating posts accept an Idempotency-Key header: a retry with the same key
returns the recorded response and appends nothing.  Errors: 400 malformed,
403 permission, 404 unknown id/path, 409 conformance violations.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import uuid
from dataclasses import dataclass

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from . import errors
from .engine import CaseInstance, Runtime
from .model import has_errors, parse_model, serialize_model, validate_model
from .persistence import Store, event_line, restore

logger = logging.getLogger(__name__)

_STATUS = {
    errors.ModelSyntaxError: 400,
    errors.DuplicateId: 400,
    errors.UnresolvedReference: 400,
    errors.InvalidModel: 400,
    errors.ExpressionError: 400,
    errors.PermissionDenied: 403,
    errors.UnknownTarget: 404,
    errors.NoSuchPath: 404,
    errors.IllegalTransition: 409,
    errors.SequenceGap: 409,
    errors.NotClaimed: 409,
    errors.RequiredIncomplete: 409,
    errors.NotAContainer: 409,
    errors.NotInScope: 409,
    errors.ScopeNotActive: 409,
    errors.AlreadyPlanned: 409,
    errors.CascadeLimitExceeded: 409,
    errors.CorruptLog: 409,
}


def _status_for(exc: errors.CasewrightError) -> int:
    for klass, status in _STATUS.items():
        if isinstance(exc, klass):
            return status
    return 500


@dataclass
class Session:
    worker: str
    roles: set[str]


class ActionBody(BaseModel):
    target: str
    action: str
    payload: object = None


class CaseFileBody(BaseModel):
    op: str
    path: str
    payload: object = None


class PlanBody(BaseModel):
    scope: str
    entry: str


class ClockBody(BaseModel):
    ticks: int


class InstanceBody(BaseModel):
    model: str
    instanceId: str | None = None


VIEWS = ("summary", "items", "milestones", "case_file", "plannable", "history")


def create_app(store: Store, tokens: dict[str, dict]) -> FastAPI:
    """tokens: {"<token>": {"worker": "...", "roles": [...]}} (static auth map)."""
    app = FastAPI(title="casewright", version="0.1.0")
    runtime = Runtime(
        model_resolver=store.resolver(),
        on_event=lambda inst, ev: store.append_event(inst.instance_id, ev.to_dict()),
        on_instance_created=lambda inst: store.create_instance_dir(inst),
    )
    for entry in tokens.values():
        runtime.register_worker(entry["worker"], set(entry.get("roles", [])))
    # recover every stored instance at startup
    for instance_id in store.list_instances():
        if instance_id in runtime.instances:
            continue
        restored = restore(store, instance_id)
        runtime.adopt(restored)
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()
    idempotency: dict[tuple[str, str], JSONResponse] = {}

    def lock_for(instance_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(instance_id, threading.Lock())

    def session(authorization: str | None = Header(default=None)) -> Session:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=403, detail="missing bearer token")
        entry = tokens.get(authorization.removeprefix("Bearer "))
        if entry is None:
            raise HTTPException(status_code=403, detail="unknown token")
        return Session(worker=entry["worker"], roles=set(entry.get("roles", [])))

    @app.exception_handler(errors.CasewrightError)
    async def engine_error(_request: Request, exc: errors.CasewrightError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": type(exc).__name__, "detail": str(exc)})

    def instance_of(instance_id: str) -> CaseInstance:
        return runtime.get_instance(instance_id)

    def mutating(instance_id: str, idempotency_key: str | None, operate) -> JSONResponse:
        with lock_for(instance_id):
            if idempotency_key is not None:
                cached = idempotency.get((instance_id, idempotency_key))
                if cached is not None:
                    return cached
            events = operate()
            response = JSONResponse({"events": [e.to_dict() for e in events]})
            if idempotency_key is not None:
                idempotency[(instance_id, idempotency_key)] = response
            return response

    # ------------------------------------------------------------- models

    @app.post("/models")
    def post_model(request_body: dict, _s: Session = Depends(session)):
        model = parse_model(json.dumps(request_body))
        diagnostics = validate_model(model)
        docs = [{"severity": d.severity, "rule": d.rule,
                 "elementId": d.element_id, "message": d.message} for d in diagnostics]
        if has_errors(diagnostics):
            return JSONResponse(status_code=400, content={"error": "InvalidModel", "diagnostics": docs})
        store.save_model(model)
        runtime.register_model(model)
        return {"id": model.id, "diagnostics": docs}

    @app.get("/models")
    def list_models(_s: Session = Depends(session)):
        return {"models": store.list_models()}

    @app.get("/models/{model_id}")
    def get_model(model_id: str, _s: Session = Depends(session)):
        return json.loads(serialize_model(store.load_model(model_id)))

    # ----------------------------------------------------------- instances

    @app.post("/instances")
    def post_instance(body: InstanceBody, _s: Session = Depends(session)):
        instance_id = body.instanceId or f"{body.model}-{uuid.uuid4().hex[:8]}"
        if instance_id in runtime.instances:
            raise HTTPException(status_code=409, detail=f"instance {instance_id!r} exists")
        model = store.load_model(body.model)
        with lock_for(instance_id):
            inst = runtime.create_instance(model, instance_id)
        return {"instanceId": inst.instance_id, "caseState": inst.case_state.value}

    @app.get("/instances")
    def list_instances(_s: Session = Depends(session)):
        return {"instances": sorted(runtime.instances)}

    @app.post("/instances/{instance_id}/actions")
    def post_action(instance_id: str, body: ActionBody, s: Session = Depends(session),
                    idempotency_key: str | None = Header(default=None)):
        inst = instance_of(instance_id)
        return mutating(instance_id, idempotency_key,
                        lambda: runtime.worker_action(inst, s.worker, body.target,
                                                      body.action, body.payload))

    @app.post("/instances/{instance_id}/casefile")
    def post_casefile(instance_id: str, body: CaseFileBody, s: Session = Depends(session),
                      idempotency_key: str | None = Header(default=None)):
        inst = instance_of(instance_id)
        return mutating(instance_id, idempotency_key,
                        lambda: runtime.case_file_op(inst, s.worker, body.op,
                                                     body.path, body.payload))

    @app.post("/instances/{instance_id}/plan")
    def post_plan(instance_id: str, body: PlanBody, s: Session = Depends(session),
                  idempotency_key: str | None = Header(default=None)):
        inst = instance_of(instance_id)
        return mutating(instance_id, idempotency_key,
                        lambda: runtime.plan(inst, s.worker, body.scope, body.entry))

    @app.post("/instances/{instance_id}/clock")
    def post_clock(instance_id: str, body: ClockBody, s: Session = Depends(session),
                   idempotency_key: str | None = Header(default=None)):
        inst = instance_of(instance_id)
        return mutating(instance_id, idempotency_key,
                        lambda: runtime.advance_clock(inst, body.ticks))

    @app.get("/instances/{instance_id}/events")
    async def get_events(instance_id: str, after: int = 0, wait: float = 30.0,
                         _s: Session = Depends(session)):
        instance_of(instance_id)

        async def stream():
            cursor = after
            idle = 0.0
            while idle < wait:
                entries = store.read_log(instance_id, after=cursor)
                if entries:
                    idle = 0.0
                    for doc in entries:
                        cursor = doc["seq"]
                        yield f"data: {event_line(doc)}\n\n"
                else:
                    await asyncio.sleep(0.05)
                    idle += 0.05
            yield "event: idle\ndata: {}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/instances/{instance_id}/{view}")
    def get_view(instance_id: str, view: str, s: Session = Depends(session)):
        if view not in VIEWS:
            raise HTTPException(status_code=404, detail=f"unknown view {view!r}")
        inst = instance_of(instance_id)
        with lock_for(instance_id):
            return {"view": view, "data": runtime.query(inst, view, actor=s.worker)}

    return app

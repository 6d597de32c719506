"""Local HTTP/JSON interface over one session, for the companion UI and
scripted clients.

The API is a veneer: every endpoint delegates to an engine operation and
serializes its result.  Real values travel as decimal strings with 17
significant digits so clients can display exactly what the engine
computed.  Mutations on the session are serialized; every response carries
the log position it observed in the ``X-Log-Position`` header.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import engine
from .core import Confidence, EntryPath, SourceMeta
from .engine import Session
from .errors import HorizonError, InvalidRequestError
from .explain import InfluenceReport
from .fusion import AutoDiscountConfig, FusionRule

API_PREFIX = "/api/v1"

_STATUS_BY_CODE = {
    "unknown_frame": 404,
    "unknown_node": 404,
    "unknown_label": 404,
    "pair_not_found": 404,
    "mass_sum_exceeded": 422,
    "invalid_mass": 422,
    "invalid_rate": 422,
    "empty_focal_set": 422,
    "invalid_frame": 422,
    "duplicate_label": 422,
    "invalid_request": 422,
    "invalid_kb": 422,
    "kb_parse_error": 422,
    "invalid_session": 422,
    "total_conflict": 409,
    "unreachable_frame": 409,
    "frame_mismatch": 409,
    "open_world_input": 409,
    "not_enough_inputs": 409,
    "invalid_node_state": 409,
    "duplicate_relation": 409,
    "resource_limit": 409,
    "frame_too_large": 409,
    "replay_mismatch": 409,
}


def _real(x: float) -> str:
    return format(x, ".17g")


def _error_response(exc: HorizonError) -> JSONResponse:
    status = _STATUS_BY_CODE.get(exc.code, 400)
    body: dict[str, Any] = {"code": exc.code, "message": str(exc)}
    if exc.detail:
        body["detail"] = {k: (_real(v) if isinstance(v, float) else v) for k, v in exc.detail.items()}
    return JSONResponse(body, status_code=status)


_MISSING = object()


def _field(payload: Any, key: str, caster, *, default=_MISSING):
    if not isinstance(payload, dict):
        raise InvalidRequestError("request body must be a JSON object")
    if key not in payload:
        if default is not _MISSING:
            return default
        raise InvalidRequestError(f"request body is missing {key!r}")
    try:
        return caster(payload[key])
    except HorizonError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidRequestError(f"bad value for {key!r}: {exc}") from exc


def _node_json(session: Session, node: engine.LineageNode) -> dict[str, Any]:
    frame = session.kb.frame(node.boe.frame_id)
    op: dict[str, Any] = {"kind": node.op.kind}
    if node.op.rate is not None:
        op["rate"] = _real(node.op.rate)
    if node.op.rule is not None:
        op["rule"] = node.op.rule.value
    if node.op.path is not None:
        op["path"] = [list(hop) for hop in node.op.path]
    if node.op.loss is not None:
        op["loss"] = _real(node.op.loss)
    source: dict[str, Any] = {
        "name": node.boe.source.name,
        "confidence": node.boe.source.confidence.value,
        "independent": node.boe.source.independent,
        "entry_path": node.boe.source.entry_path.value,
    }
    if node.boe.source.timestamp is not None:
        source["timestamp"] = node.boe.source.timestamp
    out: dict[str, Any] = {
        "node_id": node.node_id,
        "frame": node.boe.frame_id,
        "kind": node.boe.kind.value,
        "open_world": node.boe.open_world,
        "masses": [
            {"set": list(ps.labels(frame)), "mass": _real(v)}
            for ps, v in node.boe.masses.items()
        ],
        "source": source,
        "op": op,
        "inputs": list(node.inputs),
        "disabled": node.disabled,
        "inconclusive": engine.is_inconclusive(session, node.node_id),
    }
    if node.conflict is not None:
        out["conflict"] = _real(node.conflict)
    if node.op.kind == "fused":
        out["request_inputs"] = list(node.request_inputs)
    return out


def _conclusion_json(session: Session, node_id: str) -> dict[str, Any]:
    report = engine.conclusion_of(session, node_id)
    node = session.node(node_id)
    frame = session.kb.frame(node.boe.frame_id)
    return {
        "boe_id": report.boe_id,
        "conflict": _real(report.conflict),
        "unknown_mass": _real(report.unknown_mass),
        "rows": [
            {
                "statement": list(r.statement.labels(frame)),
                "support": _real(r.support),
                "uncertainty": _real(r.uncertainty),
                "against": _real(r.against),
            }
            for r in report.rows
        ],
    }


def _explanation_json(session: Session, node_id: str, report: InfluenceReport) -> dict[str, Any]:
    names = engine.source_names(session, node_id)
    from .explain import explanation_text

    return {
        "conclusion_id": report.conclusion_id,
        "most_influential": report.most_influential,
        "least_influential": report.least_influential,
        "exact": report.exact,
        "method": report.method,
        "text": explanation_text(report, names),
        "entries": [
            {
                "boe_id": e.boe_id,
                "source": names.get(e.boe_id, e.boe_id),
                "influence": _real(e.influence),
                "share": _real(e.share),
            }
            for e in report.entries
        ],
    }


def _parse_source(payload: Any) -> SourceMeta:
    if payload is None:
        raise InvalidRequestError("request body is missing 'source'")
    name = _field(payload, "name", str)
    try:
        confidence = Confidence(payload.get("confidence", "probable"))
        entry_path = EntryPath(payload.get("entry_path", "manual"))
    except ValueError as exc:
        raise InvalidRequestError(str(exc)) from exc
    return SourceMeta(
        name=name,
        confidence=confidence,
        independent=bool(payload.get("independent", True)),
        entry_path=entry_path,
        timestamp=payload.get("timestamp"),
    )


def create_app(session: Session, *, ui_dir: str | None = None) -> FastAPI:
    """Build the FastAPI application serving ``session``.

    When ``ui_dir`` points at a built frontend, it is mounted at the root
    so the whole tool runs from one port.
    """
    app = FastAPI(title="horizon", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    lock = threading.RLock()

    @app.exception_handler(HorizonError)
    async def on_domain_error(_request: Request, exc: HorizonError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            {"code": "invalid_request", "message": "request body is not valid JSON"},
            status_code=422,
        )

    @app.middleware("http")
    async def stamp_log_position(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Log-Position"] = str(session.log_position())
        return response

    @app.get(API_PREFIX + "/meta")
    def get_meta() -> dict[str, Any]:
        cfg = session.auto_discount
        return {
            "kb": {
                "name": session.kb.meta.name,
                "version": session.kb.meta.version,
                "created": session.kb.meta.created,
            },
            "log_position": session.log_position(),
            "auto_discount": {
                "enabled": cfg.enabled,
                "rate_certain": _real(cfg.rate_certain),
                "rate_probable": _real(cfg.rate_probable),
                "rate_possible": _real(cfg.rate_possible),
            },
        }

    @app.get(API_PREFIX + "/frames")
    def get_frames() -> dict[str, Any]:
        return {
            "frames": [
                {"id": f.id, "label": f.label, "propositions": list(f.propositions)}
                for f in session.kb.gallery.frames.values()
            ]
        }

    @app.get(API_PREFIX + "/relations")
    def get_relations() -> dict[str, Any]:
        out = []
        for rel in session.kb.gallery.relations.values():
            fa = session.kb.frame(rel.frame_a)
            fb = session.kb.frame(rel.frame_b)
            out.append(
                {
                    "a": rel.frame_a,
                    "b": rel.frame_b,
                    "pairs": [
                        [fa.propositions[ia], fb.propositions[ib]] for ia, ib in rel.pairs
                    ],
                }
            )
        return {"relations": out}

    @app.get(API_PREFIX + "/boes")
    def get_boes() -> dict[str, Any]:
        return {"nodes": [_node_json(session, n) for n in session.nodes.values()]}

    @app.get(API_PREFIX + "/nodes/{node_id}")
    def get_node(node_id: str) -> dict[str, Any]:
        return _node_json(session, session.node(node_id))

    @app.post(API_PREFIX + "/boes", status_code=201)
    def post_boe(payload: dict = Body(...)) -> dict[str, Any]:
        frame_id = _field(payload, "frame", str)
        masses = _field(payload, "masses", list)
        source = _parse_source(payload.get("source"))
        frame = session.kb.frame(frame_id)
        assignments = []
        for entry in masses:
            labels = _field(entry, "set", list)
            mass = _field(entry, "mass", float)
            assignments.append((frame.subset(labels), mass))
        with lock:
            node_id = engine.submit_boe(session, frame_id, assignments, source)
        return {"node_id": node_id}

    @app.post(API_PREFIX + "/ops/discount", status_code=201)
    def post_discount(payload: dict = Body(...)) -> dict[str, Any]:
        node = _field(payload, "node", str)
        rate = _field(payload, "rate", float)
        with lock:
            node_id = engine.run_discount(session, node, rate)
        return {"node_id": node_id}

    @app.post(API_PREFIX + "/ops/translate", status_code=201)
    def post_translate(payload: dict = Body(...)) -> dict[str, Any]:
        node = _field(payload, "node", str)
        target = _field(payload, "target", str)
        with lock:
            node_id = engine.run_translate(session, node, target)
        return {"node_id": node_id}

    @app.post(API_PREFIX + "/ops/fuse", status_code=201)
    def post_fuse(payload: dict = Body(...)) -> dict[str, Any]:
        nodes = _field(payload, "nodes", list)
        rule = _field(payload, "rule", str, default="dempster")
        target = _field(payload, "target", str)
        try:
            FusionRule(rule)
        except ValueError:
            raise InvalidRequestError(
                f"rule must be dempster, smets or dependent, got {rule!r}"
            ) from None
        with lock:
            if "auto_discount" in payload:
                wanted = bool(payload["auto_discount"])
                cfg = session.auto_discount
                if cfg.enabled != wanted:
                    engine.set_auto_discount(
                        session,
                        AutoDiscountConfig(
                            rate_certain=cfg.rate_certain,
                            rate_probable=cfg.rate_probable,
                            rate_possible=cfg.rate_possible,
                            enabled=wanted,
                        ),
                    )
            node_id = engine.run_fusion(session, [str(n) for n in nodes], rule, target)
        return {"node_id": node_id}

    @app.post(API_PREFIX + "/whatif", status_code=201)
    def post_whatif(payload: dict = Body(...)) -> dict[str, Any]:
        recompute = _field(payload, "recompute", str)
        disable = [str(n) for n in payload.get("disable", [])]
        rediscount_raw = payload.get("rediscount") or {}
        if not isinstance(rediscount_raw, dict):
            raise InvalidRequestError("'rediscount' must map node ids to rates")
        rediscount = {str(k): float(v) for k, v in rediscount_raw.items()}
        with lock:
            node_id = engine.what_if(
                session, recompute, disable=disable, rediscount=rediscount
            )
        return {"node_id": node_id}

    @app.get(API_PREFIX + "/nodes/{node_id}/conclusion")
    def get_conclusion(node_id: str) -> dict[str, Any]:
        return _conclusion_json(session, node_id)

    @app.get(API_PREFIX + "/nodes/{node_id}/explanation")
    def get_explanation(node_id: str) -> dict[str, Any]:
        report = engine.explanation_of(session, node_id)
        return _explanation_json(session, node_id, report)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app

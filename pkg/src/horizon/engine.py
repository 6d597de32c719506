"""The session workspace: live evidence, operations, lineage and what-if.

Every user-level request is appended to a replayable log; node values are
derived deterministically from the log and the knowledge base, so an
exported session can be re-imported and verified bit for bit.  Secondary
values produced inside a fusion pipeline (per-input discounts and
translations) become intermediate lineage nodes; no-op stages are elided.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .core import (
    BOE,
    Confidence,
    ConclusionReport,
    EntryPath,
    PropSet,
    SourceMeta,
    conclusion_report,
    make_boe,
)
from .compat import translate_to, translation_path
from .errors import (
    HorizonError,
    InvalidRateError,
    NodeStateError,
    NotEnoughInputsError,
    ReplayMismatchError,
    SessionFormatError,
    UnknownNodeError,
)
from .explain import InfluenceReport, influence
from .fusion import AutoDiscountConfig, FusionRule, discount, fuse
from .kb import KnowledgeBase, kb_from_document, kb_to_document

SESSION_SCHEMA_VERSION = "1"

# Fused results whose best non-trivial statement beats the runner-up by
# less than this support margin are flagged inconclusive.
DEFAULT_INCONCLUSIVE_MARGIN = 0.05


@dataclass(frozen=True)
class Operation:
    """What produced a node: entry, a discount, a translation chain or a
    fusion."""

    kind: str
    rate: float | None = None
    path: tuple[tuple[str, str], ...] | None = None
    loss: float | None = None
    rule: FusionRule | None = None


@dataclass
class LineageNode:
    node_id: str
    boe: BOE
    op: Operation
    inputs: tuple[str, ...] = ()
    disabled: bool = False
    conflict: float | None = None
    # None = not yet computed (fused nodes are judged lazily, on first read)
    inconclusive: bool | None = False
    request_inputs: tuple[str, ...] = ()
    created_by: int = -1


class Session:
    """One operator workspace over a fixed knowledge base.

    Single writer; all mutation goes through the module-level operations,
    which append to the log.  Node values are immutable once created.
    """

    def __init__(
        self,
        kb: KnowledgeBase,
        *,
        auto_discount: AutoDiscountConfig | None = None,
        inconclusive_margin: float = DEFAULT_INCONCLUSIVE_MARGIN,
    ) -> None:
        self.kb = kb
        self.auto_discount = auto_discount if auto_discount is not None else AutoDiscountConfig()
        self.inconclusive_margin = inconclusive_margin
        self.initial_auto_discount = self.auto_discount
        self.nodes: dict[str, LineageNode] = {}
        self.log: list[dict[str, Any]] = []
        self._next = 1

    # -- helpers -----------------------------------------------------------

    def node(self, node_id: str) -> LineageNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"no node with id {node_id!r}") from None

    def log_position(self) -> int:
        return len(self.log)


def new_session(
    kb: KnowledgeBase,
    *,
    auto_discount: AutoDiscountConfig | None = None,
    inconclusive_margin: float = DEFAULT_INCONCLUSIVE_MARGIN,
) -> Session:
    return Session(kb, auto_discount=auto_discount, inconclusive_margin=inconclusive_margin)


# ---------------------------------------------------------------------------
# record execution

def _alloc_id(counter: int) -> str:
    return f"n{counter}"


def _chain_has_auto_discount(session: Session, staged: dict[str, LineageNode], node_id: str) -> bool:
    node = staged.get(node_id) or session.node(node_id)
    if node.op.kind == "auto_discounted":
        return True
    return any(
        _chain_has_auto_discount(session, staged, parent) for parent in node.inputs
    )


def _normalize_assignments(
    session: Session, frame_id: str, assignments: Iterable
) -> list[tuple[list[str], float]]:
    """Coerce submitted assignments to (label list, mass) pairs, the form
    stored in the log."""
    frame = session.kb.frame(frame_id)
    out: list[list] = []
    for entry in assignments:
        ps, mass = entry
        if isinstance(ps, PropSet):
            labels = list(ps.labels(frame))
        else:
            labels = [str(lab) for lab in ps]
        # JSON-native shape so a replayed log compares equal to a live one
        out.append([labels, float(mass)])
    return out


def _source_to_record(source: SourceMeta) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "name": source.name,
        "confidence": source.confidence.value,
        "independent": source.independent,
        "entry_path": source.entry_path.value,
    }
    if source.timestamp is not None:
        rec["timestamp"] = source.timestamp
    return rec


def _source_from_record(rec: Any) -> SourceMeta:
    if not isinstance(rec, dict) or "name" not in rec:
        raise SessionFormatError("source record must be an object with a name")
    try:
        return SourceMeta(
            name=str(rec["name"]),
            confidence=Confidence(rec.get("confidence", "probable")),
            independent=bool(rec.get("independent", True)),
            entry_path=EntryPath(rec.get("entry_path", "manual")),
            timestamp=rec.get("timestamp"),
        )
    except ValueError as exc:
        raise SessionFormatError(f"bad source record: {exc}") from exc


def _execute_submit(session: Session, record: Mapping[str, Any]) -> str:
    frame = session.kb.frame(str(record["frame"]))
    source = _source_from_record(record["source"])
    assignments = [
        (frame.subset(labels), float(mass)) for labels, mass in record["assignments"]
    ]
    node_id = _alloc_id(session._next)
    boe = make_boe(frame, assignments, source, boe_id=node_id)
    node = LineageNode(node_id, boe, Operation("entered"), created_by=len(session.log))
    session._next += 1
    session.nodes[node_id] = node
    return node_id


def _execute_discount(session: Session, record: Mapping[str, Any]) -> str:
    node = session.node(str(record["node"]))
    rate = float(record["rate"])
    node_id = _alloc_id(session._next)
    boe = discount(node.boe, rate, result_id=node_id)
    session._next += 1
    session.nodes[node_id] = LineageNode(
        node_id,
        boe,
        Operation("discounted", rate=rate),
        inputs=(node.node_id,),
        created_by=len(session.log),
    )
    return node_id


def _execute_translate(session: Session, record: Mapping[str, Any]) -> str:
    node = session.node(str(record["node"]))
    target = str(record["target"])
    session.kb.frame(target)
    node_id = _alloc_id(session._next)
    translated = translate_to(node.boe, session.kb.gallery, target, result_id=node_id)
    session._next += 1
    session.nodes[node_id] = LineageNode(
        node_id,
        translated.boe,
        Operation("translated", path=translated.path, loss=translated.loss),
        inputs=(node.node_id,),
        created_by=len(session.log),
    )
    return node_id


def is_inconclusive(session: Session, node_id: str) -> bool:
    """Whether a fused result fails to separate its best non-trivial
    statement from the runner-up by the session margin (the full-set row
    always has support 1 and is ignored; a result with no committed
    statement at all is inconclusive by definition).

    Computed on first read and cached: judging a conclusion requires the
    full support table, which is wasted work for intermediate values.
    """
    node = session.node(node_id)
    if node.inconclusive is None:
        report = conclusion_report(node.boe, conflict=node.conflict or 0.0)
        rows = [r for r in report.rows if not r.statement.is_full]
        if not rows:
            node.inconclusive = True
        elif len(rows) == 1:
            node.inconclusive = False
        else:
            node.inconclusive = (
                rows[0].support - rows[1].support < session.inconclusive_margin
            )
    return node.inconclusive


def _run_pipeline_and_fuse(
    session: Session,
    input_ids: Sequence[str],
    rule: FusionRule,
    target: str,
    rate_overrides: Mapping[str, float] | None,
) -> str:
    """Discount/translate each input as needed, then fuse.  All nodes are
    staged and committed only if the whole pipeline succeeds."""
    enabled = []
    for nid in input_ids:
        node = session.node(nid)
        if not node.disabled:
            enabled.append(node)
    if len(enabled) < 2:
        raise NotEnoughInputsError(
            f"fusion needs at least 2 enabled inputs, got {len(enabled)}"
        )
    session.kb.frame(target)
    for node in enabled:
        translation_path(session.kb.gallery, node.boe.frame_id, target)

    overrides = rate_overrides or {}
    for nid, rate in overrides.items():
        if not 0.0 <= float(rate) <= 1.0:
            raise InvalidRateError(f"discount rate for {nid!r} must lie in [0, 1], got {rate!r}")

    staged: dict[str, LineageNode] = {}
    counter = session._next
    log_pos = len(session.log)
    final_ids: list[str] = []
    boes: list[BOE] = []

    for node in enabled:
        value = node.boe
        current_id = node.node_id
        if node.node_id in overrides:
            rate = float(overrides[node.node_id])
            op_kind = "discounted"
        elif (
            session.auto_discount.enabled
            and not _chain_has_auto_discount(session, staged, node.node_id)
        ):
            rate = session.auto_discount.rate_for(value.source.confidence)
            op_kind = "auto_discounted"
        else:
            rate = 0.0
            op_kind = "discounted"
        if rate > 0.0:
            new_id = _alloc_id(counter)
            counter += 1
            value = discount(value, rate, result_id=new_id)
            staged[new_id] = LineageNode(
                new_id,
                value,
                Operation(op_kind, rate=rate),
                inputs=(current_id,),
                created_by=log_pos,
            )
            current_id = new_id
        if value.frame_id != target:
            new_id = _alloc_id(counter)
            counter += 1
            translated = translate_to(value, session.kb.gallery, target, result_id=new_id)
            value = translated.boe
            staged[new_id] = LineageNode(
                new_id,
                value,
                Operation("translated", path=translated.path, loss=translated.loss),
                inputs=(current_id,),
                created_by=log_pos,
            )
            current_id = new_id
        final_ids.append(current_id)
        boes.append(value)

    fused_id = _alloc_id(counter)
    counter += 1
    fused_boe, conflict = fuse(boes, rule, result_id=fused_id)
    fused_node = LineageNode(
        fused_id,
        fused_boe,
        Operation("fused", rule=rule),
        inputs=tuple(final_ids),
        conflict=conflict if rule is FusionRule.DEMPSTER else None,
        inconclusive=None,
        request_inputs=tuple(n.node_id for n in enabled),
        created_by=log_pos,
    )

    session.nodes.update(staged)
    session.nodes[fused_id] = fused_node
    session._next = counter
    return fused_id


def _execute_fuse(session: Session, record: Mapping[str, Any]) -> str:
    rule = FusionRule(record["rule"])
    return _run_pipeline_and_fuse(
        session,
        [str(n) for n in record["nodes"]],
        rule,
        str(record["target"]),
        None,
    )


def _execute_what_if(session: Session, record: Mapping[str, Any]) -> str:
    base = session.node(str(record["recompute"]))
    if base.op.kind != "fused":
        raise NodeStateError(
            f"what-if recomputes fused nodes; {base.node_id!r} is {base.op.kind!r}"
        )
    disable = {str(n) for n in record.get("disable", [])}
    rediscount = {
        str(k): float(v) for k, v in (record.get("rediscount") or {}).items()
    }
    survivors = [nid for nid in base.request_inputs if nid not in disable]
    if len(survivors) < 2:
        raise NotEnoughInputsError(
            f"what-if must leave at least 2 enabled inputs, got {len(survivors)}"
        )
    assert base.op.rule is not None
    return _run_pipeline_and_fuse(
        session, survivors, base.op.rule, base.boe.frame_id, rediscount
    )


def _execute_set_auto_discount(session: Session, record: Mapping[str, Any]) -> None:
    cfg = AutoDiscountConfig(
        rate_certain=float(record.get("rate_certain", session.auto_discount.rate_certain)),
        rate_probable=float(record.get("rate_probable", session.auto_discount.rate_probable)),
        rate_possible=float(record.get("rate_possible", session.auto_discount.rate_possible)),
        enabled=bool(record.get("enabled", session.auto_discount.enabled)),
    )
    for rate in (cfg.rate_certain, cfg.rate_probable, cfg.rate_possible):
        if not 0.0 <= rate <= 1.0:
            raise InvalidRateError(f"auto-discount rates must lie in [0, 1], got {rate!r}")
    session.auto_discount = cfg
    return None


def _execute_set_disabled(session: Session, record: Mapping[str, Any]) -> None:
    node = session.node(str(record["node"]))
    node.disabled = bool(record["disabled"])
    return None


_EXECUTORS = {
    "submit_boe": _execute_submit,
    "discount": _execute_discount,
    "translate": _execute_translate,
    "fuse": _execute_fuse,
    "what_if": _execute_what_if,
    "set_auto_discount": _execute_set_auto_discount,
    "set_disabled": _execute_set_disabled,
}


def apply_record(session: Session, record: Mapping[str, Any]) -> str | None:
    """Validate and execute one log record, appending it on success.

    This is the single mutation path: live operations and session replay
    both go through it, which is what makes replay bit-identical.
    """
    if not isinstance(record, Mapping) or "op" not in record:
        raise SessionFormatError("log record must be an object with an 'op' key")
    op = record["op"]
    executor = _EXECUTORS.get(op)
    if executor is None:
        raise SessionFormatError(f"unknown operation {op!r} in log record")
    try:
        result = executor(session, record)
    except KeyError as exc:
        raise SessionFormatError(f"record for {op!r} is missing key {exc}") from exc
    session.log.append(dict(record))
    return result


# ---------------------------------------------------------------------------
# public operations


def submit_boe(
    session: Session,
    frame_id: str,
    assignments: Iterable,
    source: SourceMeta,
) -> str:
    """Enter a new initial BOE.  Assignments may use PropSets or label
    iterables; an invalid distribution leaves the session unchanged."""
    record = {
        "op": "submit_boe",
        "frame": frame_id,
        "assignments": _normalize_assignments(session, frame_id, assignments),
        "source": _source_to_record(source),
    }
    result = apply_record(session, record)
    assert result is not None
    return result


def run_discount(session: Session, node_id: str, rate: float) -> str:
    result = apply_record(session, {"op": "discount", "node": node_id, "rate": float(rate)})
    assert result is not None
    return result


def run_translate(session: Session, node_id: str, target_frame: str) -> str:
    result = apply_record(session, {"op": "translate", "node": node_id, "target": target_frame})
    assert result is not None
    return result


def run_fusion(
    session: Session,
    node_ids: Sequence[str],
    rule: FusionRule | str,
    target_frame: str,
) -> str:
    """Fuse the selected nodes on the target frame.

    Per input, the pipeline is: auto-discount (if enabled and this evidence
    chain has not been confidence-discounted before), then translation to
    the target along the shortest relation chain, then the selected rule.
    Intermediate values appear as lineage nodes; stages that change nothing
    are elided.
    """
    record = {
        "op": "fuse",
        "nodes": [str(n) for n in node_ids],
        "rule": FusionRule(rule).value,
        "target": target_frame,
    }
    result = apply_record(session, record)
    assert result is not None
    return result


def what_if(
    session: Session,
    recompute: str,
    *,
    disable: Iterable[str] = (),
    rediscount: Mapping[str, float] | None = None,
) -> str:
    """Re-run the fusion that produced ``recompute`` with some inputs
    excluded and/or discounted at operator-chosen rates.  The original node
    is untouched."""
    record = {
        "op": "what_if",
        "recompute": recompute,
        "disable": sorted(str(n) for n in disable),
        "rediscount": {str(k): float(v) for k, v in (rediscount or {}).items()},
    }
    result = apply_record(session, record)
    assert result is not None
    return result


def set_auto_discount(session: Session, cfg: AutoDiscountConfig) -> None:
    apply_record(
        session,
        {
            "op": "set_auto_discount",
            "enabled": cfg.enabled,
            "rate_certain": cfg.rate_certain,
            "rate_probable": cfg.rate_probable,
            "rate_possible": cfg.rate_possible,
        },
    )


def set_disabled(session: Session, node_id: str, disabled: bool = True) -> None:
    apply_record(session, {"op": "set_disabled", "node": node_id, "disabled": disabled})


def conclusion_of(session: Session, node_id: str) -> ConclusionReport:
    node = session.node(node_id)
    return conclusion_report(node.boe, conflict=node.conflict or 0.0)


def explanation_of(session: Session, node_id: str) -> InfluenceReport:
    """Influence ranking over the values that entered the fusion producing
    ``node_id``."""
    node = session.node(node_id)
    if node.op.kind != "fused":
        raise NodeStateError(
            f"explanations apply to fused nodes; {node_id!r} is {node.op.kind!r}"
        )
    contributions = [session.node(i).boe for i in node.inputs]
    assert node.op.rule is not None
    return influence(contributions, rule=node.op.rule, conclusion_id=node_id)


def source_names(session: Session, node_id: str) -> dict[str, str]:
    """Display names for the contributions of a fused node, keyed by the
    contribution node ids."""
    node = session.node(node_id)
    return {i: session.node(i).boe.source.name for i in node.inputs}


# ---------------------------------------------------------------------------
# export / import


def node_digest(node: LineageNode) -> str:
    h = hashlib.sha256()
    h.update(node.node_id.encode())
    h.update(node.boe.frame_id.encode())
    for ps, v in node.boe.masses.items():
        h.update(f"{ps.bits:x}={v!r};".encode())
    h.update(node.op.kind.encode())
    h.update(",".join(node.inputs).encode())
    if node.conflict is not None:
        h.update(repr(node.conflict).encode())
    return h.hexdigest()


def export_session(session: Session) -> bytes:
    """Serialize the session as its KB snapshot plus the operation log and
    per-node value digests for tamper detection on import."""
    doc = {
        "version": SESSION_SCHEMA_VERSION,
        "kb": kb_to_document(session.kb),
        "initial": {
            "auto_discount": {
                "enabled": session.initial_auto_discount.enabled,
                "rate_certain": session.initial_auto_discount.rate_certain,
                "rate_probable": session.initial_auto_discount.rate_probable,
                "rate_possible": session.initial_auto_discount.rate_possible,
            },
            "inconclusive_margin": session.inconclusive_margin,
        },
        "log": session.log,
        "digests": {nid: node_digest(n) for nid, n in session.nodes.items()},
    }
    return (json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def import_session(data: bytes | str) -> Session:
    """Rebuild a session by replaying its log against the embedded KB
    snapshot, verifying that every node value is reproduced exactly."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SessionFormatError(
            f"session document is not valid JSON: {exc.msg} at line {exc.lineno}"
        ) from exc
    if not isinstance(doc, dict) or doc.get("version") != SESSION_SCHEMA_VERSION:
        raise SessionFormatError(
            f"unsupported session version {doc.get('version')!r}; "
            f"expected {SESSION_SCHEMA_VERSION!r}"
        )
    kb = kb_from_document(doc.get("kb"))
    initial = doc.get("initial", {})
    ad = initial.get("auto_discount", {})
    cfg = AutoDiscountConfig(
        rate_certain=float(ad.get("rate_certain", 0.0)),
        rate_probable=float(ad.get("rate_probable", 0.20)),
        rate_possible=float(ad.get("rate_possible", 0.40)),
        enabled=bool(ad.get("enabled", True)),
    )
    session = new_session(
        kb,
        auto_discount=cfg,
        inconclusive_margin=float(initial.get("inconclusive_margin", DEFAULT_INCONCLUSIVE_MARGIN)),
    )
    log = doc.get("log")
    if not isinstance(log, list):
        raise SessionFormatError("session log must be a list of records")
    for record in log:
        try:
            apply_record(session, record)
        except HorizonError as exc:
            if isinstance(exc, SessionFormatError):
                raise
            raise ReplayMismatchError(
                f"log replay failed at position {session.log_position()}: {exc}"
            ) from exc

    digests = doc.get("digests", {})
    if set(digests) != set(session.nodes):
        missing = sorted(set(digests) ^ set(session.nodes))
        raise ReplayMismatchError(
            f"replayed nodes do not match the recorded set (first difference: {missing[:3]})"
        )
    for nid, node in session.nodes.items():
        if node_digest(node) != digests.get(nid):
            raise ReplayMismatchError(
                f"node {nid!r} does not reproduce its recorded value; "
                "the log or snapshot was modified"
            )
    return session

"""Knowledge-base files: frames, compatibility relations and static evidence.

The on-disk format is a single UTF-8 JSON document (conventionally
``*.horizon.json``): human-editable, diff-friendly and language neutral.
Serialization is canonical (sorted keys, arrays in declaration order,
masses printed with 17 significant digits) so saving a loaded KB is
byte-stable.  Loading validates everything; a malformed document always
produces a diagnostic, never a partial knowledge base.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import IO, Any, Iterable

from importlib import resources

from .compat import FrameGallery, add_relation, gallery_of
from .core import (
    BOE,
    BoeKind,
    Confidence,
    EntryPath,
    Frame,
    SourceMeta,
    make_boe,
    make_frame,
)
from .errors import (
    HorizonError,
    KbParseError,
    KbValidationError,
    PairNotFoundError,
    UnknownFrameError,
)

KB_SCHEMA_VERSION = "1"
KB_FILE_EXTENSION = ".horizon.json"


@dataclass(frozen=True)
class KbMeta:
    name: str
    version: str
    created: str


@dataclass(frozen=True)
class KnowledgeBase:
    """An immutable bundle of frames, relations and static BOEs.

    Edits produce new values; existing references stay valid.
    """

    gallery: FrameGallery
    static_boes: tuple[BOE, ...]
    meta: KbMeta

    def frame(self, frame_id: str) -> Frame:
        return self.gallery.frame(frame_id)


# ---------------------------------------------------------------------------
# canonical JSON


def _canonical(value: Any, level: int) -> str:
    """Render a document value canonically: object keys sorted, arrays kept
    in order, floats at 17 significant digits (enough to round-trip)."""
    pad = "  " * level
    inner = "  " * (level + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_canonical(value[k], level + 1)}"
            for k in sorted(value)
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        parts = [f"{inner}{_canonical(v, level + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__} canonically")


def canonical_json_bytes(doc: Any) -> bytes:
    return (_canonical(doc, 0) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# document <-> value conversion


def kb_to_document(kb: KnowledgeBase) -> dict[str, Any]:
    frames = [
        {"id": f.id, "label": f.label, "propositions": list(f.propositions)}
        for f in kb.gallery.frames.values()
    ]
    relations = []
    for rel in kb.gallery.relations.values():
        fa = kb.gallery.frame(rel.frame_a)
        fb = kb.gallery.frame(rel.frame_b)
        relations.append(
            {
                "a": rel.frame_a,
                "b": rel.frame_b,
                "pairs": [
                    [fa.propositions[ia], fb.propositions[ib]] for ia, ib in rel.pairs
                ],
            }
        )
    static = []
    for boe in kb.static_boes:
        frame = kb.gallery.frame(boe.frame_id)
        source: dict[str, Any] = {
            "name": boe.source.name,
            "confidence": boe.source.confidence.value,
            "independent": boe.source.independent,
        }
        if boe.source.timestamp is not None:
            source["timestamp"] = boe.source.timestamp
        static.append(
            {
                "id": boe.id,
                "frame": boe.frame_id,
                "masses": [
                    {"set": list(ps.labels(frame)), "mass": v}
                    for ps, v in boe.masses.items()
                ],
                "source": source,
            }
        )
    return {
        "version": KB_SCHEMA_VERSION,
        "meta": {"name": kb.meta.name, "version": kb.meta.version, "created": kb.meta.created},
        "frames": frames,
        "relations": relations,
        "static_boes": static,
    }


def _expect(doc: dict[str, Any], key: str, kind: type, where: str) -> Any:
    if key not in doc:
        raise KbValidationError(f"{where} is missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise KbValidationError(
            f"{where}: key {key!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def kb_from_document(doc: Any) -> KnowledgeBase:
    if not isinstance(doc, dict):
        raise KbValidationError("KB document must be a JSON object")
    version = doc.get("version")
    if version != KB_SCHEMA_VERSION:
        raise KbValidationError(
            f"unsupported KB schema version {version!r}; expected {KB_SCHEMA_VERSION!r}"
        )
    meta_doc = _expect(doc, "meta", dict, "KB document")
    meta = KbMeta(
        name=_expect(meta_doc, "name", str, "meta"),
        version=_expect(meta_doc, "version", str, "meta"),
        created=_expect(meta_doc, "created", str, "meta"),
    )

    frames_doc = _expect(doc, "frames", list, "KB document")
    if not frames_doc:
        raise KbValidationError("KB must define at least one frame")
    frames: list[Frame] = []
    for i, fd in enumerate(frames_doc):
        where = f"frames[{i}]"
        if not isinstance(fd, dict):
            raise KbValidationError(f"{where} must be an object")
        fid = _expect(fd, "id", str, where)
        props = _expect(fd, "propositions", list, where)
        if not all(isinstance(p, str) for p in props):
            raise KbValidationError(f"frame {fid!r}: propositions must all be strings")
        try:
            frames.append(make_frame(fid, props, fd.get("label", fid)))
        except HorizonError as exc:
            raise KbValidationError(f"frame {fid!r}: {exc}") from exc
    try:
        gallery = gallery_of(frames)
    except HorizonError as exc:
        raise KbValidationError(str(exc)) from exc

    for i, rd in enumerate(doc.get("relations", [])):
        where = f"relations[{i}]"
        if not isinstance(rd, dict):
            raise KbValidationError(f"{where} must be an object")
        a = _expect(rd, "a", str, where)
        b = _expect(rd, "b", str, where)
        pairs_doc = _expect(rd, "pairs", list, where)
        pairs = []
        for p in pairs_doc:
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
                raise KbValidationError(
                    f"{where} ({a!r}-{b!r}): each pair must be [label_a, label_b]"
                )
            pairs.append((p[0], p[1]))
        try:
            gallery, _ = add_relation(gallery, a, b, pairs)
        except HorizonError as exc:
            raise KbValidationError(f"relation {a!r}-{b!r}: {exc}") from exc

    static: list[BOE] = []
    seen_ids: set[str] = set()
    for i, bd in enumerate(doc.get("static_boes", [])):
        where = f"static_boes[{i}]"
        if not isinstance(bd, dict):
            raise KbValidationError(f"{where} must be an object")
        bid = _expect(bd, "id", str, where)
        if bid in seen_ids:
            raise KbValidationError(f"static BOE id {bid!r} appears twice")
        seen_ids.add(bid)
        frame_id = _expect(bd, "frame", str, where)
        try:
            frame = gallery.frame(frame_id)
        except UnknownFrameError as exc:
            raise KbValidationError(f"static BOE {bid!r}: {exc}") from exc
        source_doc = _expect(bd, "source", dict, where)
        try:
            confidence = Confidence(source_doc.get("confidence", "probable"))
        except ValueError:
            raise KbValidationError(
                f"static BOE {bid!r}: confidence must be certain, probable or possible"
            ) from None
        source = SourceMeta(
            name=_expect(source_doc, "name", str, f"{where}.source"),
            confidence=confidence,
            independent=bool(source_doc.get("independent", True)),
            entry_path=EntryPath.STATIC_KB,
            timestamp=source_doc.get("timestamp"),
        )
        assignments = []
        for md in _expect(bd, "masses", list, where):
            if not isinstance(md, dict):
                raise KbValidationError(f"static BOE {bid!r}: each mass entry must be an object")
            labels = _expect(md, "set", list, f"{where}.masses")
            mass = md.get("mass")
            if not isinstance(mass, (int, float)) or isinstance(mass, bool):
                raise KbValidationError(f"static BOE {bid!r}: mass must be a number")
            try:
                assignments.append((frame.subset(labels), float(mass)))
            except HorizonError as exc:
                raise KbValidationError(f"static BOE {bid!r}: {exc}") from exc
        try:
            static.append(
                make_boe(frame, assignments, source, boe_id=bid, kind=BoeKind.INITIAL)
            )
        except HorizonError as exc:
            raise KbValidationError(f"static BOE {bid!r}: {exc}", detail=exc.detail) from exc

    return KnowledgeBase(gallery, tuple(static), meta)


# ---------------------------------------------------------------------------
# load / save / edit


def load_kb(source: bytes | str | IO[bytes]) -> KnowledgeBase:
    """Parse and fully validate a KB document.

    Accepts raw bytes, text, or a readable binary stream.  Parse errors
    carry line/column detail; semantic errors name the offending frame,
    relation or BOE.
    """
    if hasattr(source, "read"):
        data = source.read()  # type: ignore[union-attr]
    else:
        data = source
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KbParseError(
            f"KB document is not valid JSON: {exc.msg} at line {exc.lineno}, column {exc.colno}",
            detail={"line": exc.lineno, "column": exc.colno},
        ) from exc
    return kb_from_document(doc)


def save_kb(kb: KnowledgeBase, sink: IO[bytes] | None = None) -> bytes:
    """Serialize canonically; loading the output reproduces ``kb`` exactly
    and a second save is byte-identical."""
    payload = canonical_json_bytes(kb_to_document(kb))
    if sink is not None:
        sink.write(payload)
    return payload


def edit_relation(
    kb: KnowledgeBase,
    frame_a: str,
    frame_b: str,
    add: Iterable[tuple[str, str]] = (),
    remove: Iterable[tuple[str, str]] = (),
) -> KnowledgeBase:
    """Return a new KB with the relation's pair set updated.

    Pairs are given by label.  Removing a pair that is not present is an
    error listing it; adding an existing pair is a no-op, so an add
    followed by the same remove restores the original relation.
    """
    fa = kb.gallery.frame(frame_a)
    fb = kb.gallery.frame(frame_b)
    existing = kb.gallery.relation_between(fa.id, fb.id)
    flipped = existing is not None and existing.frame_a != fa.id
    if flipped:
        # keep the stored orientation; the caller's pairs are (a, b) in the
        # caller's argument order, so flip them too
        fa, fb = fb, fa
        add = [(lb, la) for la, lb in add]
        remove = [(lb, la) for la, lb in remove]

    current: set[tuple[int, int]] = set(existing.pairs) if existing else set()
    for la, lb in add:
        current.add((fa.index_of(la), fb.index_of(lb)))
    for la, lb in remove:
        pair = (fa.index_of(la), fb.index_of(lb))
        if pair not in current:
            raise PairNotFoundError(
                f"pair ({la!r}, {lb!r}) is not part of the "
                f"{fa.id!r}-{fb.id!r} relation"
            )
        current.remove(pair)

    label_pairs = [(fa.propositions[ia], fb.propositions[ib]) for ia, ib in sorted(current)]
    gallery, _ = add_relation(kb.gallery, fa, fb, label_pairs, replace_existing=True)
    return replace(kb, gallery=gallery)


def sample_kb_path():
    """Path of the illustrative KB shipped with the package."""
    return resources.files(__package__) / "data" / "sample_kb.horizon.json"


def sample_kb() -> KnowledgeBase:
    """Load the shipped sample KB (six linked naval-attribute frames)."""
    return load_kb(sample_kb_path().read_bytes())

"""The frame gallery: compatibility relations and evidence translation.

A compatibility relation pairs propositions of two frames that can be true
at the same time.  Evidence expressed on one frame is moved to a related
frame by taking, for each focal set, the union of the partners of its
elements.  When frames are not directly related, translation is routed
along the shortest chain of relations in the gallery.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from math import fsum
from types import MappingProxyType
from typing import Iterable, Mapping

from .core import BOE, BoeKind, Frame, PropSet, _boe_from_bits
from .errors import (
    DuplicateRelationError,
    FrameDefinitionError,
    FrameMismatchError,
    OpenWorldInputError,
    UnknownFrameError,
    UnreachableFrameError,
)


class Direction(str, Enum):
    A_TO_B = "a_to_b"
    B_TO_A = "b_to_a"


@dataclass(frozen=True)
class CompatibilityRelation:
    """Element-level pairing between two frames.

    Pairs are index pairs (position in frame a, position in frame b); the
    relation is undirected and may be many-to-many.  An empty pair set is a
    legal degenerate relation under which every image is empty.
    """

    frame_a: str
    frame_b: str
    size_a: int
    size_b: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.frame_a == self.frame_b:
            raise FrameDefinitionError(
                f"a compatibility relation needs two distinct frames, got {self.frame_a!r} twice"
            )
        for ia, ib in self.pairs:
            if not 0 <= ia < self.size_a or not 0 <= ib < self.size_b:
                raise FrameDefinitionError(
                    f"pair ({ia}, {ib}) out of range for relation "
                    f"{self.frame_a!r}-{self.frame_b!r}"
                )

    @cached_property
    def _forward(self) -> tuple[int, ...]:
        masks = [0] * self.size_a
        for ia, ib in self.pairs:
            masks[ia] |= 1 << ib
        return tuple(masks)

    @cached_property
    def _backward(self) -> tuple[int, ...]:
        masks = [0] * self.size_b
        for ia, ib in self.pairs:
            masks[ib] |= 1 << ia
        return tuple(masks)

    def key(self) -> tuple[str, str]:
        return tuple(sorted((self.frame_a, self.frame_b)))  # type: ignore[return-value]

    def source_frame(self, direction: Direction) -> tuple[str, int]:
        if direction is Direction.A_TO_B:
            return self.frame_a, self.size_a
        return self.frame_b, self.size_b

    def target_frame(self, direction: Direction) -> tuple[str, int]:
        if direction is Direction.A_TO_B:
            return self.frame_b, self.size_b
        return self.frame_a, self.size_a

    def image_bits(self, bits: int, direction: Direction) -> int:
        masks = self._forward if direction is Direction.A_TO_B else self._backward
        out = 0
        while bits:
            low = bits & -bits
            out |= masks[low.bit_length() - 1]
            bits ^= low
        return out


def make_relation(
    frame_a: Frame, frame_b: Frame, pairs: Iterable[tuple[str, str]]
) -> CompatibilityRelation:
    """Resolve label pairs against the two frames and build the relation."""
    index_pairs = sorted(
        {(frame_a.index_of(la), frame_b.index_of(lb)) for la, lb in pairs}
    )
    return CompatibilityRelation(
        frame_a.id, frame_b.id, frame_a.size, frame_b.size, tuple(index_pairs)
    )


def image(rel: CompatibilityRelation, s: PropSet, direction: Direction | str) -> PropSet:
    """The set of target-side propositions compatible with some element of
    ``s``: the union of the partners of its members."""
    direction = Direction(direction)
    src_id, src_size = rel.source_frame(direction)
    tgt_id, tgt_size = rel.target_frame(direction)
    if s.frame_id != src_id or s.size != src_size:
        raise FrameMismatchError(
            f"set on frame {s.frame_id!r} is not on the {direction.value} source "
            f"side ({src_id!r}) of relation {rel.frame_a!r}-{rel.frame_b!r}"
        )
    return PropSet(tgt_id, tgt_size, rel.image_bits(s.bits, direction))


@dataclass(frozen=True)
class FrameGallery:
    """Registered frames plus the undirected graph of their relations.

    Immutable: adding a relation produces a new gallery value, so sessions
    and knowledge bases can share galleries freely.
    """

    frames: Mapping[str, Frame]
    relations: Mapping[tuple[str, str], CompatibilityRelation]

    def frame(self, frame_id: str) -> Frame:
        try:
            return self.frames[frame_id]
        except KeyError:
            raise UnknownFrameError(f"no frame registered with id {frame_id!r}") from None

    def relation_between(self, a: str, b: str) -> CompatibilityRelation | None:
        return self.relations.get(tuple(sorted((a, b))))  # type: ignore[arg-type]

    def neighbors(self, frame_id: str) -> tuple[str, ...]:
        out = []
        for a, b in self.relations:
            if a == frame_id:
                out.append(b)
            elif b == frame_id:
                out.append(a)
        return tuple(sorted(out))


def gallery_of(frames: Iterable[Frame]) -> FrameGallery:
    frame_map: dict[str, Frame] = {}
    for f in frames:
        if f.id in frame_map:
            raise FrameDefinitionError(f"frame id {f.id!r} registered twice")
        frame_map[f.id] = f
    return FrameGallery(MappingProxyType(frame_map), MappingProxyType({}))


def add_relation(
    gallery: FrameGallery,
    frame_a: Frame | str,
    frame_b: Frame | str,
    pairs: Iterable[tuple[str, str]],
    *,
    replace_existing: bool = False,
) -> tuple[FrameGallery, CompatibilityRelation]:
    """Store a relation between two registered frames.

    Returns the new gallery and the stored relation.  An existing relation
    on the same frame pair is only overwritten when ``replace_existing`` is
    set.
    """
    fa = gallery.frame(frame_a if isinstance(frame_a, str) else frame_a.id)
    fb = gallery.frame(frame_b if isinstance(frame_b, str) else frame_b.id)
    rel = make_relation(fa, fb, pairs)
    key = rel.key()
    if key in gallery.relations and not replace_existing:
        raise DuplicateRelationError(
            f"frames {key[0]!r} and {key[1]!r} are already related; "
            "pass replace_existing=True to overwrite"
        )
    relations = dict(gallery.relations)
    relations[key] = rel
    return FrameGallery(gallery.frames, MappingProxyType(relations)), rel


@dataclass(frozen=True)
class TranslationHop:
    frame_from: str
    frame_to: str
    loss: float


@dataclass(frozen=True)
class Translated:
    """A translated BOE plus its audit trail.

    ``loss`` per hop is the input mass whose image was empty; it was moved
    to the target frame's full set rather than silently renormalized away,
    so the operator can see how much evidence found no compatible
    proposition.
    """

    boe: BOE
    hops: tuple[TranslationHop, ...]

    @property
    def loss(self) -> float:
        return fsum(h.loss for h in self.hops)

    @property
    def path(self) -> tuple[tuple[str, str], ...]:
        return tuple((h.frame_from, h.frame_to) for h in self.hops)


def translate(
    boe: BOE,
    rel: CompatibilityRelation,
    direction: Direction | str | None = None,
    *,
    result_id: str | None = None,
) -> Translated:
    """Move a closed-world BOE across one relation.

    Each focal set's mass is added to its image; mass whose image is empty
    is assigned to the target full set and counted as translation loss.
    """
    if boe.open_world:
        raise OpenWorldInputError(f"body {boe.id!r} carries unknown mass; translate needs closed-world input")
    if direction is None:
        if boe.frame_id == rel.frame_a:
            direction = Direction.A_TO_B
        elif boe.frame_id == rel.frame_b:
            direction = Direction.B_TO_A
        else:
            raise FrameMismatchError(
                f"body on frame {boe.frame_id!r} matches neither side of relation "
                f"{rel.frame_a!r}-{rel.frame_b!r}"
            )
    direction = Direction(direction)
    src_id, _ = rel.source_frame(direction)
    if boe.frame_id != src_id:
        raise FrameMismatchError(
            f"body on frame {boe.frame_id!r} is not on the {direction.value} "
            f"source side ({src_id!r})"
        )
    tgt_id, tgt_size = rel.target_frame(direction)
    full = (1 << tgt_size) - 1
    full_src = (1 << boe.frame_size) - 1
    acc: dict[int, float] = {}
    lost = []
    for ps, v in boe.masses.items():
        if ps.bits == full_src:
            # total ignorance about the source frame says nothing about the
            # target frame, even when the relation covers it only partially
            img = full
        else:
            img = rel.image_bits(ps.bits, direction)
            if img == 0:
                lost.append(v)
                img = full
        acc[img] = acc.get(img, 0.0) + v
    out = _boe_from_bits(
        tgt_id,
        tgt_size,
        acc,
        boe.source,
        result_id if result_id is not None else f"{boe.id}@{tgt_id}",
        BoeKind.SECONDARY,
    )
    return Translated(out, (TranslationHop(boe.frame_id, tgt_id, fsum(lost)),))


def translation_path(
    gallery: FrameGallery, frame_from: Frame | str, frame_to: Frame | str
) -> list[tuple[CompatibilityRelation, Direction]]:
    """A shortest chain of relations between two frames (breadth-first);
    empty when source and target coincide.

    Among equal-length chains the one whose frame-id sequence is
    lexicographically smallest is returned, so repeated runs route evidence
    identically.
    """
    src = frame_from if isinstance(frame_from, str) else frame_from.id
    dst = frame_to if isinstance(frame_to, str) else frame_to.id
    gallery.frame(src)
    gallery.frame(dst)
    if src == dst:
        return []

    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        cur = queue.popleft()
        for nb in gallery.neighbors(cur):
            if nb not in dist:
                dist[nb] = dist[cur] + 1
                queue.append(nb)
    if src not in dist:
        raise UnreachableFrameError(
            f"no chain of compatibility relations links frame {src!r} to {dst!r}"
        )

    hops: list[tuple[CompatibilityRelation, Direction]] = []
    cur = src
    while cur != dst:
        nxt = min(nb for nb in gallery.neighbors(cur) if dist.get(nb) == dist[cur] - 1)
        rel = gallery.relation_between(cur, nxt)
        assert rel is not None
        direction = Direction.A_TO_B if rel.frame_a == cur else Direction.B_TO_A
        hops.append((rel, direction))
        cur = nxt
    return hops


def translate_to(
    boe: BOE,
    gallery: FrameGallery,
    target: Frame | str,
    *,
    result_id: str | None = None,
) -> Translated:
    """Translate a BOE to ``target`` along the shortest relation chain.

    Already being on the target frame is the identity on masses (the result
    is still marked secondary, with an empty hop trail).
    """
    target_id = target if isinstance(target, str) else target.id
    path = translation_path(gallery, boe.frame_id, target_id)
    if not path:
        out = replace(
            boe,
            id=result_id if result_id is not None else f"{boe.id}@{target_id}",
            kind=BoeKind.SECONDARY,
        )
        return Translated(out, ())
    hops: list[TranslationHop] = []
    current = boe
    for i, (rel, direction) in enumerate(path):
        last = i == len(path) - 1
        step = translate(
            current, rel, direction, result_id=result_id if last else None
        )
        hops.extend(step.hops)
        current = step.boe
    return Translated(current, tuple(hops))

"""Frames of discernment, proposition sets and bodies of evidence.

A frame is an ordered list of mutually exclusive atomic propositions,
exactly one of which is true.  Subsets of a frame are represented sparsely
as arbitrary-width bit patterns (Python integers), so frames with hundreds
of propositions cost nothing beyond the focal sets actually stored.  A body
of evidence (BOE) is a unit mass distribution over such subsets plus the
metadata of the source that produced it.

All values here are immutable; every operation is a pure function.  Mass
maps are built in ascending bit-pattern order so that iteration, and
therefore floating-point accumulation, is reproducible run to run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from math import fsum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateLabelError,
    EmptyFocalSetError,
    FrameDefinitionError,
    FrameMismatchError,
    FrameTooLargeError,
    InvalidMassError,
    MassSumExceededError,
    UnknownLabelError,
)

# Mass bookkeeping tolerance: a BOE is well formed when its masses sum to
# one within this bound.
MASS_TOL = 1e-9

# Largest frame on which the full 2^n subset lattice is enumerated exactly.
# Above the cap, callers must use the restricted computation in `explain`.
EXPLANATION_FRAME_CAP = 20


class Confidence(str, Enum):
    """Operator confidence in an information source."""

    CERTAIN = "certain"
    PROBABLE = "probable"
    POSSIBLE = "possible"


class EntryPath(str, Enum):
    """How a body of evidence got into the system."""

    STATIC_KB = "static_kb"
    AUTOMATED_FEED = "automated_feed"
    MANUAL = "manual"


class BoeKind(str, Enum):
    """Initial evidence is entered; secondary evidence is derived from it
    by discount, translation or fusion."""

    INITIAL = "initial"
    SECONDARY = "secondary"


@dataclass(frozen=True)
class Frame:
    """A named set of mutually exclusive atomic propositions.

    The proposition order is significant: it fixes the bit positions used
    by every :class:`PropSet` on this frame and is preserved by
    serialization.
    """

    id: str
    label: str
    propositions: tuple[str, ...]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.propositions)}

    @property
    def size(self) -> int:
        return len(self.propositions)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(
                f"frame {self.id!r} has no proposition {label!r}"
            ) from None

    def prop_set(self, indices: Iterable[int]) -> PropSet:
        bits = 0
        for i in indices:
            if not 0 <= i < self.size:
                raise FrameDefinitionError(
                    f"proposition index {i} out of range for frame {self.id!r}"
                )
            bits |= 1 << i
        return PropSet(self.id, self.size, bits)

    def subset(self, labels: Iterable[str]) -> PropSet:
        return self.prop_set(self.index_of(lab) for lab in labels)

    def atom(self, label: str) -> PropSet:
        return PropSet(self.id, self.size, 1 << self.index_of(label))

    def full_set(self) -> PropSet:
        return PropSet(self.id, self.size, (1 << self.size) - 1)

    def empty_set(self) -> PropSet:
        return PropSet(self.id, self.size, 0)


def make_frame(frame_id: str, propositions: Sequence[str], label: str | None = None) -> Frame:
    """Build a frame, validating that the proposition list is usable.

    Raises :class:`FrameDefinitionError` for an empty id or list and
    :class:`DuplicateLabelError` naming the first repeated label.
    """
    if not frame_id:
        raise FrameDefinitionError("frame id must be nonempty")
    props = tuple(propositions)
    if not props:
        raise FrameDefinitionError(f"frame {frame_id!r} has an empty proposition list")
    seen: set[str] = set()
    for p in props:
        if not p:
            raise FrameDefinitionError(f"frame {frame_id!r} has an empty proposition label")
        if p in seen:
            raise DuplicateLabelError(f"frame {frame_id!r} repeats proposition {p!r}")
        seen.add(p)
    return Frame(frame_id, label if label is not None else frame_id, props)


@dataclass(frozen=True)
class PropSet:
    """A subset of one frame's propositions, stored as a bit pattern.

    Bit i corresponds to the frame's i-th proposition.  The empty set is
    representable (it is the "unknown" carrier of open-world results) but
    is rejected as a focal set of directly constructed evidence.
    """

    frame_id: str
    size: int
    bits: int

    def __post_init__(self) -> None:
        if self.size <= 0:
            raise ValueError("proposition set needs a positive frame size")
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError(
                f"bit pattern {self.bits:#x} does not fit a frame of size {self.size}"
            )

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_full(self) -> bool:
        return self.bits == (1 << self.size) - 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.size) if self.bits >> i & 1)

    def labels(self, frame: Frame) -> tuple[str, ...]:
        self._require_frame(frame.id)
        return tuple(frame.propositions[i] for i in self.members())

    def atoms(self) -> Iterator[PropSet]:
        for i in self.members():
            yield PropSet(self.frame_id, self.size, 1 << i)

    def union(self, other: PropSet) -> PropSet:
        self._require_same(other)
        return PropSet(self.frame_id, self.size, self.bits | other.bits)

    def intersect(self, other: PropSet) -> PropSet:
        self._require_same(other)
        return PropSet(self.frame_id, self.size, self.bits & other.bits)

    def complement(self) -> PropSet:
        return PropSet(self.frame_id, self.size, ((1 << self.size) - 1) ^ self.bits)

    def issubset(self, other: PropSet) -> bool:
        self._require_same(other)
        return self.bits & other.bits == self.bits

    def _require_same(self, other: PropSet) -> None:
        if self.frame_id != other.frame_id or self.size != other.size:
            raise FrameMismatchError(
                f"proposition sets live on different frames: "
                f"{self.frame_id!r} vs {other.frame_id!r}"
            )

    def _require_frame(self, frame_id: str) -> None:
        if self.frame_id != frame_id:
            raise FrameMismatchError(
                f"proposition set on frame {self.frame_id!r} used with frame {frame_id!r}"
            )


@dataclass(frozen=True)
class SourceMeta:
    """Provenance of a body of evidence.

    ``independent`` records the operator's screening judgment that the
    source does not repeat observations already captured by other bodies;
    ``timestamp`` is an ISO-8601 instant when known.
    """

    name: str
    confidence: Confidence = Confidence.PROBABLE
    independent: bool = True
    entry_path: EntryPath = EntryPath.MANUAL
    timestamp: str | None = None


#: Source attached to derived values when nothing better is known.
DERIVED_SOURCE_CONFIDENCE = Confidence.CERTAIN


@dataclass(frozen=True, eq=True)
class BOE:
    """A body of evidence: a unit mass distribution over proposition sets.

    Focal sets are the keys of ``masses``; every stored mass is strictly
    positive and the total is one within :data:`MASS_TOL`.  A BOE carrying
    mass on the empty set is an open-world value: the truth may lie outside
    the frame.  Such values are produced only by the unnormalized
    conjunctive fusion rule.
    """

    id: str
    frame_id: str
    masses: Mapping[PropSet, float]
    source: SourceMeta
    kind: BoeKind = BoeKind.INITIAL

    @property
    def frame_size(self) -> int:
        return next(iter(self.masses)).size

    @property
    def open_world(self) -> bool:
        return any(ps.is_empty for ps in self.masses)

    @property
    def unknown_mass(self) -> float:
        """Mass committed to the empty set (zero for closed-world values)."""
        for ps, v in self.masses.items():
            if ps.is_empty:
                return v
        return 0.0

    @property
    def theta_mass(self) -> float:
        """Mass committed to the full set, i.e. entirely uncommitted belief."""
        for ps, v in self.masses.items():
            if ps.is_full:
                return v
        return 0.0

    def mass_of(self, ps: PropSet) -> float:
        return self.masses.get(ps, 0.0)

    def focal_sets(self) -> tuple[PropSet, ...]:
        return tuple(self.masses)

    def is_vacuous(self) -> bool:
        return len(self.masses) == 1 and next(iter(self.masses)).is_full


def _boe_from_bits(
    frame_id: str,
    size: int,
    masses_by_bits: Mapping[int, float],
    source: SourceMeta,
    boe_id: str,
    kind: BoeKind,
    *,
    allow_empty_set: bool = False,
) -> BOE:
    """Assemble a BOE from a bits->mass map, dropping zeros and fixing the
    canonical ascending key order.  Internal: callers guarantee the masses
    already sum to one."""
    items = [(b, v) for b, v in sorted(masses_by_bits.items()) if v > 0.0]
    if not allow_empty_set:
        items = [(b, v) for b, v in items if b != 0]
    total = fsum(v for _, v in items)
    if abs(total - 1.0) > MASS_TOL:
        raise InvalidMassError(
            f"body {boe_id!r} has mass total {total!r}, expected 1",
            detail={"total": total},
        )
    masses = {PropSet(frame_id, size, b): v for b, v in items}
    return BOE(boe_id, frame_id, MappingProxyType(masses), source, kind)


def _content_id(frame_id: str, items: Iterable[tuple[int, float]], source_name: str) -> str:
    h = hashlib.sha256()
    h.update(frame_id.encode())
    h.update(source_name.encode())
    for b, v in items:
        h.update(f"{b:x}:{v!r};".encode())
    return "boe-" + h.hexdigest()[:12]


def make_boe(
    frame: Frame,
    assignments: Iterable[tuple[PropSet, float]],
    source: SourceMeta,
    *,
    boe_id: str | None = None,
    kind: BoeKind = BoeKind.INITIAL,
) -> BOE:
    """Build a closed-world BOE from (proposition set, mass) assignments.

    Zero-mass entries are dropped and duplicate sets merged by summation.
    When the entered masses sum to less than one, the deficit is treated as
    uncommitted belief and assigned to the full set; a sum above one is an
    error.  The empty set is never a legal focal set here.
    """
    acc: dict[int, float] = {}
    for ps, mass in assignments:
        ps._require_frame(frame.id)
        if ps.size != frame.size:
            raise FrameMismatchError(
                f"proposition set width {ps.size} does not match frame "
                f"{frame.id!r} of size {frame.size}"
            )
        if ps.is_empty:
            raise EmptyFocalSetError(
                f"the empty set cannot carry mass in frame {frame.id!r}"
            )
        if mass < 0.0:
            raise InvalidMassError(f"negative mass {mass!r}")
        acc[ps.bits] = acc.get(ps.bits, 0.0) + mass
    acc = {b: v for b, v in acc.items() if v > 0.0}
    total = fsum(acc.values())
    if total > 1.0 + MASS_TOL:
        raise MassSumExceededError(
            f"masses sum to {total!r}, exceeding 1", detail={"total": total}
        )
    deficit = 1.0 - total
    if deficit > MASS_TOL:
        full = (1 << frame.size) - 1
        acc[full] = acc.get(full, 0.0) + deficit
    if boe_id is None:
        boe_id = _content_id(frame.id, sorted(acc.items()), source.name)
    return _boe_from_bits(frame.id, frame.size, acc, source, boe_id, kind)


def vacuous_boe(frame: Frame, source: SourceMeta | None = None, *, boe_id: str | None = None) -> BOE:
    """The total-ignorance BOE: all mass on the full set."""
    src = source if source is not None else SourceMeta("vacuous", Confidence.CERTAIN)
    return make_boe(frame, [], src, boe_id=boe_id)


def _require_set_on(boe: BOE, a: PropSet) -> None:
    if a.frame_id != boe.frame_id or a.size != boe.frame_size:
        raise FrameMismatchError(
            f"proposition set on frame {a.frame_id!r} queried against a body "
            f"on frame {boe.frame_id!r}"
        )


def belief(boe: BOE, a: PropSet) -> float:
    """Total mass committed to nonempty subsets of ``a``: the evidence that
    directly supports the statement."""
    _require_set_on(boe, a)
    return fsum(
        v for ps, v in boe.masses.items() if ps.bits and ps.bits & a.bits == ps.bits
    )


def plausibility(boe: BOE, a: PropSet) -> float:
    """Total mass not contradicting ``a``: everything whose focal set meets it."""
    _require_set_on(boe, a)
    return fsum(v for ps, v in boe.masses.items() if ps.bits & a.bits)


def commonality(boe: BOE, a: PropSet) -> float:
    """Total mass on supersets of ``a``.

    The commonality function multiplies pointwise under unnormalized
    conjunctive combination, which is what makes the additive information
    measure below decompose over fused sources.
    """
    _require_set_on(boe, a)
    return fsum(v for ps, v in boe.masses.items() if ps.bits & a.bits == a.bits)


def info_measure(boe: BOE, *, cap: int = EXPLANATION_FRAME_CAP) -> float:
    """Information content of a body: minus the sum of log2 commonality over
    every subset of the frame with positive commonality.

    The vacuous body scores exactly 0.  Subsets with zero commonality are
    excluded (their logarithm is undefined), so the additive decomposition
    over fused sources holds exactly only when all commonalities are
    positive.

    This enumerates the full 2^n lattice, so it refuses frames larger than
    ``cap``; use the restricted influence computation in
    :mod:`horizon.explain` for those.
    """
    n = boe.frame_size
    if n > cap:
        raise FrameTooLargeError(
            f"frame of size {n} exceeds the exact-enumeration cap of {cap}; "
            "use the capped influence computation (horizon.explain.influence)"
        )
    q = np.zeros(1 << n)
    for ps, v in boe.masses.items():
        q[ps.bits] += v
    for i in range(n):
        view = q.reshape(-1, 2 << i)
        view[:, : 1 << i] += view[:, 1 << i :]
    positive = q[q > 0.0]
    return float(-np.sum(np.log2(positive))) + 0.0


@dataclass(frozen=True)
class ConclusionRow:
    """Evidence standing for one statement: the fraction backing it, the
    fraction against it, and the uncommitted remainder; the three add up
    to one."""

    statement: PropSet
    support: float
    uncertainty: float
    against: float


@dataclass(frozen=True)
class ConclusionReport:
    """The conclusions-window content for one BOE.

    ``conflict`` is the normalization conflict reported by Dempster fusion
    (zero when not applicable); ``unknown_mass`` is the mass the
    unnormalized rule left on the empty set (zero for closed-world
    values), in which case rows are computed on the conditionally
    renormalized closed-world part.
    """

    boe_id: str
    rows: tuple[ConclusionRow, ...]
    conflict: float = 0.0
    unknown_mass: float = 0.0


def conclusion_report(boe: BOE, *, conflict: float = 0.0) -> ConclusionReport:
    """Summarize a BOE as support/uncertainty/against rows.

    Rows cover the focal sets and their atomic members, filtered to
    statements with nonzero support or nonzero mass.  An atom that is not
    itself focal always has zero support (the only nonempty subset of a
    singleton is itself), so the surviving rows are exactly the focal
    sets.  Open-world input is first conditioned on "the truth is in the
    frame" and the stripped empty-set mass reported separately.
    """
    unknown = boe.unknown_mass
    if unknown >= 1.0 - MASS_TOL:
        return ConclusionReport(boe.id, (), conflict, unknown)
    items = [(ps.bits, v) for ps, v in boe.masses.items() if ps.bits]
    if unknown > 0.0:
        scale = 1.0 / fsum(v for _, v in items)
        items = [(b, v * scale) for b, v in items]

    rows = []
    for cb, _mass in items:
        support = plausible = against = 0.0
        for fb, v in items:
            overlap = fb & cb
            if overlap:
                plausible += v
                if overlap == fb:
                    support += v
            else:
                against += v
        rows.append(
            ConclusionRow(
                PropSet(boe.frame_id, boe.frame_size, cb),
                support,
                plausible - support,
                against,
            )
        )
    rows.sort(key=lambda r: (-r.support, r.statement.bits))
    return ConclusionReport(boe.id, tuple(rows), conflict, unknown)

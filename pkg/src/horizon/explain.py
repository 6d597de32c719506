"""Influence ranking: which evidence drove a conclusion.

Under the unnormalized conjunctive rule the information measure is
additive over the combined bodies, so each contribution's standalone
information content is its share of the pooled information.  That is the
primary influence score.  The dependent (averaging) rule has no such
decomposition; for it, influence falls back to how much the pooled
information changes when a source is left out.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, log2
from typing import Iterable, Mapping, Sequence

from .core import (
    BOE,
    EXPLANATION_FRAME_CAP,
    PropSet,
    commonality,
    info_measure,
)
from .errors import FrameMismatchError, NotEnoughInputsError, ResourceLimitError
from .fusion import FusionRule, fuse_dependent, fuse_smets

# Ceiling for the union-closure family used on frames beyond the exact cap.
CLOSURE_LIMIT = 100_000

METHOD_STANDALONE = "standalone_info"
METHOD_LEAVE_ONE_OUT = "leave_one_out"


@dataclass(frozen=True)
class InfluenceEntry:
    boe_id: str
    influence: float
    share: float


@dataclass(frozen=True)
class InfluenceReport:
    """Contribution ranking for one conclusion.

    Entries are sorted by descending influence (ties broken by id);
    ``exact`` is false when the frame was too large for full lattice
    enumeration and scores were computed on the union-closure of the
    contributions' focal sets instead.
    """

    conclusion_id: str
    entries: tuple[InfluenceEntry, ...]
    most_influential: str
    least_influential: str
    exact: bool
    method: str = METHOD_STANDALONE


def union_closure(sets: Iterable[PropSet], *, limit: int = CLOSURE_LIMIT) -> list[PropSet]:
    """Close a family of proposition sets under pairwise union.

    Returns the closure sorted by bit pattern; fails loudly if it grows
    past ``limit``.
    """
    seeds = list(sets)
    if not seeds:
        return []
    frame_id, size = seeds[0].frame_id, seeds[0].size
    closed: set[int] = set()
    queue = [ps.bits for ps in seeds]
    while queue:
        x = queue.pop()
        if x in closed:
            continue
        closed.add(x)
        if len(closed) > limit:
            raise ResourceLimitError(
                f"union closure exceeded {limit} sets; the contributions are too "
                "fragmented for restricted influence scoring"
            )
        for y in list(closed):
            u = x | y
            if u not in closed:
                queue.append(u)
    return [PropSet(frame_id, size, b) for b in sorted(closed)]


def restricted_info(boe: BOE, subsets: Sequence[PropSet]) -> float:
    """Information content summed over an explicit subset family only
    (positive-commonality terms), for frames too large to enumerate."""
    total = fsum(
        -log2(q)
        for q in (commonality(boe, ps) for ps in subsets)
        if q > 0.0
    )
    return total + 0.0


def _combine_for_loo(contributions: Sequence[BOE]) -> BOE:
    if len(contributions) == 1:
        return contributions[0]
    return fuse_dependent(contributions)


def influence(
    contributions: Sequence[BOE],
    *,
    cap: int = EXPLANATION_FRAME_CAP,
    rule: FusionRule | str = FusionRule.SMETS,
    conclusion_id: str = "",
) -> InfluenceReport:
    """Rank the bodies that entered a fusion by their influence on it.

    ``contributions`` must be the values that actually entered the
    combination (post-discount, post-translation), all on one frame.  For
    the conjunctive rules the score is each body's standalone information
    content, whose sum equals the information of the unnormalized
    combination whenever all commonalities are positive.  For the
    dependent rule the score is the absolute information change when that
    body is left out, and the report says so via ``method``.
    """
    if not contributions:
        raise NotEnoughInputsError("influence ranking needs at least one contribution")
    rule = FusionRule(rule)
    frame_id = contributions[0].frame_id
    size = contributions[0].frame_size
    for b in contributions:
        if b.frame_id != frame_id or b.frame_size != size:
            raise FrameMismatchError(
                f"contributions span frames {frame_id!r} and {b.frame_id!r}"
            )

    exact = size <= cap
    if exact:
        def score_info(b: BOE) -> float:
            return info_measure(b, cap=cap)
    else:
        lattice = union_closure(
            ps for b in contributions for ps in b.focal_sets() if not ps.is_empty
        )

        def score_info(b: BOE) -> float:
            return restricted_info(b, lattice)

    if rule is FusionRule.DEPENDENT and len(contributions) > 1:
        method = METHOD_LEAVE_ONE_OUT
        full = score_info(_combine_for_loo(contributions))
        scores = []
        for i, b in enumerate(contributions):
            rest = [c for j, c in enumerate(contributions) if j != i]
            scores.append((b.id, abs(full - score_info(_combine_for_loo(rest)))))
    else:
        method = METHOD_STANDALONE
        scores = [(b.id, score_info(b)) for b in contributions]

    scores.sort(key=lambda item: (-item[1], item[0]))
    total = fsum(s for _, s in scores)
    entries = tuple(
        InfluenceEntry(boe_id, s, s / total if total > 0.0 else 0.0)
        for boe_id, s in scores
    )
    return InfluenceReport(
        conclusion_id=conclusion_id,
        entries=entries,
        most_influential=entries[0].boe_id,
        least_influential=entries[-1].boe_id,
        exact=exact,
        method=method,
    )


def leave_one_out_deltas(
    contributions: Sequence[BOE], *, cap: int = EXPLANATION_FRAME_CAP
) -> dict[str, float]:
    """Secondary cross-check scores for conjunctive conclusions: the signed
    change in unnormalized-combination information when each body is
    removed.  Equals the standalone score whenever all commonalities are
    positive."""
    if len(contributions) < 2:
        raise NotEnoughInputsError("leave-one-out needs at least two contributions")
    full = info_measure(fuse_smets(contributions), cap=cap)
    deltas: dict[str, float] = {}
    for i, b in enumerate(contributions):
        rest = [c for j, c in enumerate(contributions) if j != i]
        remaining = rest[0] if len(rest) == 1 else fuse_smets(rest)
        deltas[b.id] = full - info_measure(remaining, cap=cap)
    return deltas


def explanation_text(report: InfluenceReport, names: Mapping[str, str] | None = None) -> str:
    """Render a deterministic one-paragraph explanation of the ranking,
    naming the most and least influential sources."""
    if not report.entries:
        raise NotEnoughInputsError("cannot explain an empty influence report")
    names = names or {}

    def display(boe_id: str) -> str:
        return names.get(boe_id, boe_id)

    total = fsum(e.influence for e in report.entries)
    parts: list[str]
    if len(report.entries) == 1:
        only = report.entries[0]
        parts = [
            f"{display(only.boe_id)} is the only contributing source; "
            f"the conclusion rests entirely on it "
            f"({only.influence:.4f} bits of information)."
        ]
    else:
        top = report.entries[0]
        tied = [e for e in report.entries if e.influence == top.influence]
        least = report.entries[-1]
        if len(tied) > 1:
            tied_names = " and ".join(display(e.boe_id) for e in tied)
            parts = [
                f"{tied_names} contributed the most information in equal measure "
                f"({top.share:.1%} each of {total:.4f} bits in total; "
                f"listed in identifier order)."
            ]
        else:
            parts = [
                f"{display(top.boe_id)} contributed the most information to this "
                f"conclusion ({top.share:.1%} of {total:.4f} bits in total)."
            ]
        bottom_tied = [e for e in report.entries if e.influence == least.influence]
        if len(bottom_tied) < len(report.entries):
            parts.append(
                f"{display(least.boe_id)} contributed the least ({least.share:.1%})."
            )
    if report.method == METHOD_LEAVE_ONE_OUT:
        parts.append(
            "Influence here measures how much the pooled information changes "
            "when a source is removed, because the dependent rule does not "
            "decompose additively."
        )
    if not report.exact:
        parts.append(
            "Scores were computed on a restricted family of statements because "
            "the frame is too large to enumerate; treat them as approximate."
        )
    return " ".join(parts)

"""Discounting and the three fusion rules.

Conjunctive combination works directly on the sparse focal sets: the
product of two bodies touches only pairs of stored focal sets, never the
full subset lattice.  Dempster's rule renormalizes the conflict away; the
unnormalized rule keeps it on the empty set as an explicit "unknown"; the
dependent rule averages mass functions so that fusing a body with itself
changes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import fsum
from typing import Sequence

from .core import (
    BOE,
    BoeKind,
    Confidence,
    PropSet,
    SourceMeta,
    _boe_from_bits,
)
from .errors import (
    FrameMismatchError,
    InvalidRateError,
    NotEnoughInputsError,
    OpenWorldInputError,
    ResourceLimitError,
    TotalConflictError,
)

# Hard bound on intermediate focal-set counts during a conjunctive product;
# beyond this the operation fails loudly instead of degrading.
FOCAL_SET_LIMIT = 100_000


class FusionRule(str, Enum):
    DEMPSTER = "dempster"
    SMETS = "smets"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class AutoDiscountConfig:
    """Discount rates applied automatically from a source's confidence tag.

    The defaults are 0% for certain, 20% for probable and 40% for possible
    sources; all three are configurable.
    """

    rate_certain: float = 0.0
    rate_probable: float = 0.20
    rate_possible: float = 0.40
    enabled: bool = True

    def rate_for(self, confidence: Confidence) -> float:
        if confidence is Confidence.CERTAIN:
            return self.rate_certain
        if confidence is Confidence.PROBABLE:
            return self.rate_probable
        return self.rate_possible


def discount(boe: BOE, rate: float, *, result_id: str | None = None) -> BOE:
    """Weaken a body by moving the fraction ``rate`` of every committed mass
    to the full set.

    rate 0 keeps the masses identical; rate 1 yields the vacuous body.
    """
    if not 0.0 <= rate <= 1.0:
        raise InvalidRateError(f"discount rate must lie in [0, 1], got {rate!r}")
    if boe.open_world:
        raise OpenWorldInputError(f"body {boe.id!r} carries unknown mass; discount needs closed-world input")
    size = boe.frame_size
    full = (1 << size) - 1
    keep = 1.0 - rate
    acc: dict[int, float] = {}
    for ps, v in boe.masses.items():
        if ps.bits != full:
            acc[ps.bits] = keep * v
    acc[full] = keep * boe.theta_mass + rate
    return _boe_from_bits(
        boe.frame_id,
        size,
        acc,
        boe.source,
        result_id if result_id is not None else f"{boe.id}~d{rate:g}",
        BoeKind.SECONDARY,
    )


def auto_discount(boe: BOE, cfg: AutoDiscountConfig, *, result_id: str | None = None) -> BOE:
    """Discount a body by the rate its source's confidence tag selects.

    Identity when the feature is disabled or the selected rate is zero.
    Callers that track lineage are responsible for applying this at most
    once per evidence chain.
    """
    if not cfg.enabled:
        return boe
    rate = cfg.rate_for(boe.source.confidence)
    if rate == 0.0:
        return boe
    return discount(boe, rate, result_id=result_id)


def _require_combinable(boes: Sequence[BOE]) -> tuple[str, int]:
    if len(boes) < 2:
        raise NotEnoughInputsError(f"fusion needs at least 2 bodies, got {len(boes)}")
    frame_id = boes[0].frame_id
    size = boes[0].frame_size
    for b in boes:
        if b.frame_id != frame_id or b.frame_size != size:
            raise FrameMismatchError(
                f"cannot fuse bodies on different frames: {frame_id!r} vs {b.frame_id!r}"
            )
        if b.open_world:
            raise OpenWorldInputError(
                f"body {b.id!r} carries unknown mass; fusion accepts closed-world inputs only"
            )
    return frame_id, size


def _conjunctive_product(boes: Sequence[BOE]) -> dict[int, float]:
    """Unnormalized product of all input mass functions on focal-set
    intersections, including the mass landing on the empty set.

    Iteration order is fixed (ascending bit patterns at every step) so the
    accumulated floating-point values are reproducible.
    """
    acc: dict[int, float] = {ps.bits: v for ps, v in boes[0].masses.items()}
    for boe in boes[1:]:
        nxt: dict[int, float] = {}
        for b1, v1 in sorted(acc.items()):
            for ps2, v2 in boe.masses.items():
                k = b1 & ps2.bits
                nxt[k] = nxt.get(k, 0.0) + v1 * v2
        if len(nxt) > FOCAL_SET_LIMIT:
            raise ResourceLimitError(
                f"conjunctive product produced {len(nxt)} focal sets, "
                f"exceeding the limit of {FOCAL_SET_LIMIT}"
            )
        acc = nxt
    return acc


def _fused_source(boes: Sequence[BOE], rule: FusionRule) -> SourceMeta:
    names = ", ".join(b.source.name for b in boes)
    # Derived values get a certain tag so a stray auto-discount is a no-op.
    return SourceMeta(
        name=f"fused[{rule.value}]({names})",
        confidence=Confidence.CERTAIN,
        independent=False,
        entry_path=boes[0].source.entry_path,
    )


def fuse_dempster(
    boes: Sequence[BOE], *, result_id: str | None = None
) -> tuple[BOE, float]:
    """Dempster's rule over two or more independent closed-world bodies.

    Returns the normalized combination and the conflict K, defined as one
    minus the total surviving (nonempty-intersection) mass of the full
    unnormalized product, which is independent of fold order.  Total
    conflict (K = 1) is an error.
    """
    frame_id, size = _require_combinable(boes)
    product = _conjunctive_product(boes)
    survivors = sorted((b, v) for b, v in product.items() if b != 0 and v > 0.0)
    survived = fsum(v for _, v in survivors)
    if not survivors or survived <= 0.0:
        raise TotalConflictError(
            "the bodies are totally conflicting; no intersection of their "
            "focal sets survives"
        )
    conflict = 1.0 - survived
    masses = {b: v / survived for b, v in survivors}
    boe = _boe_from_bits(
        frame_id,
        size,
        masses,
        _fused_source(boes, FusionRule.DEMPSTER),
        result_id if result_id is not None else "+".join(b.id for b in boes),
        BoeKind.SECONDARY,
    )
    return boe, conflict


def fuse_smets(boes: Sequence[BOE], *, result_id: str | None = None) -> BOE:
    """Unnormalized conjunctive combination.

    Conflicting mass stays on the empty set and reads as "the truth may not
    be in the frame"; commonalities multiply pointwise, which keeps the
    information measure additive over the inputs.  The result is open-world
    whenever the inputs conflict at all.
    """
    frame_id, size = _require_combinable(boes)
    product = _conjunctive_product(boes)
    return _boe_from_bits(
        frame_id,
        size,
        product,
        _fused_source(boes, FusionRule.SMETS),
        result_id if result_id is not None else "+".join(b.id for b in boes),
        BoeKind.SECONDARY,
        allow_empty_set=True,
    )


def fuse_dependent(boes: Sequence[BOE], *, result_id: str | None = None) -> BOE:
    """Combine bodies suspected of sharing observations.

    Focal-set-wise arithmetic mean of the input mass functions: idempotent
    (fusing a body with itself returns it unchanged), commutative, and
    never manufactures certainty the way a conjunctive rule would on
    repeated evidence.
    """
    frame_id, size = _require_combinable(boes)
    keys: set[int] = set()
    for b in boes:
        keys.update(ps.bits for ps in b.masses)
    n = len(boes)
    acc: dict[int, float] = {}
    for bits in sorted(keys):
        ps = PropSet(frame_id, size, bits)
        acc[bits] = fsum(b.mass_of(ps) for b in boes) / n
    return _boe_from_bits(
        frame_id,
        size,
        acc,
        _fused_source(boes, FusionRule.DEPENDENT),
        result_id if result_id is not None else "+".join(b.id for b in boes),
        BoeKind.SECONDARY,
    )


def fuse(
    boes: Sequence[BOE], rule: FusionRule | str, *, result_id: str | None = None
) -> tuple[BOE, float]:
    """Dispatch to the selected rule; the conflict component is zero for
    rules that do not renormalize."""
    rule = FusionRule(rule)
    if rule is FusionRule.DEMPSTER:
        return fuse_dempster(boes, result_id=result_id)
    if rule is FusionRule.SMETS:
        return fuse_smets(boes, result_id=result_id), 0.0
    return fuse_dependent(boes, result_id=result_id), 0.0


@dataclass(frozen=True)
class ZadehComparison:
    """Dempster fusion of the same bodies with and without auto-discounting.

    High-conflict inputs drive the plain rule to near-certain conclusions
    on propositions barely supported by anyone; discounting by source
    confidence keeps moderate mass on the full set so zeroed propositions
    can recover support.
    """

    baseline: BOE
    baseline_conflict: float
    discounted_inputs: tuple[BOE, ...]
    mitigated: BOE
    mitigated_conflict: float
    rates: tuple[float, ...]


def zadeh_guard_demo(boes: Sequence[BOE], cfg: AutoDiscountConfig) -> ZadehComparison:
    """Run Dempster fusion with and without confidence-based discounting,
    for regression-testing the high-conflict mitigation."""
    baseline, k_raw = fuse_dempster(boes)
    discounted = tuple(auto_discount(b, cfg) for b in boes)
    mitigated, k_mit = fuse_dempster(discounted)
    rates = tuple(
        cfg.rate_for(b.source.confidence) if cfg.enabled else 0.0 for b in boes
    )
    return ZadehComparison(baseline, k_raw, discounted, mitigated, k_mit, rates)

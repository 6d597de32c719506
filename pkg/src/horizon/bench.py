"""Synthetic workload generator and timing harness.

The default shape reproduces a worst-case operational load: 35 bodies of
evidence on frames of 8 to 352 propositions (mean around 211), followed by
25 discount operations, 29 translations and 35 fusions.  Everything is
driven by a seeded generator, so the same seed produces the same workload
and the same node values; a digest over all node values makes that
checkable.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, field

from . import engine
from .compat import FrameGallery, add_relation, gallery_of
from .core import Confidence, EntryPath, Frame, SourceMeta, make_frame
from .fusion import AutoDiscountConfig, FusionRule
from .kb import KbMeta, KnowledgeBase


@dataclass(frozen=True)
class BenchConfig:
    boes: int = 35
    frame_min: int = 8
    frame_max: int = 352
    frame_mean_target: int = 211
    n_frames: int = 16
    max_focal_sets: int = 64
    discounts: int = 25
    translations: int = 29
    fusions: int = 35
    seed: int = 1


@dataclass
class BenchResult:
    config: BenchConfig
    frame_sizes: list[int]
    mean_frame_size: float
    phase_seconds: dict[str, float] = field(default_factory=dict)
    node_count: int = 0
    digest: str = ""

    @property
    def total_seconds(self) -> float:
        return sum(self.phase_seconds.values())


def _build_frames(cfg: BenchConfig, rng: random.Random) -> list[Frame]:
    if cfg.n_frames < 2:
        raise ValueError("benchmark needs at least 2 frames")
    sizes = [cfg.frame_min, cfg.frame_max]
    sizes += [rng.randint(cfg.frame_min, cfg.frame_max) for _ in range(cfg.n_frames - 3)]
    balance = cfg.frame_mean_target * cfg.n_frames - sum(sizes)
    sizes.append(max(cfg.frame_min, min(cfg.frame_max, balance)))
    # spread any residual over the middle entries so the mean lands on
    # target whenever the bounds allow it
    residual = cfg.frame_mean_target * cfg.n_frames - sum(sizes)
    for i in range(2, len(sizes)):
        if residual == 0:
            break
        if residual > 0:
            step = min(residual, cfg.frame_max - sizes[i])
        else:
            step = max(residual, cfg.frame_min - sizes[i])
        sizes[i] += step
        residual -= step
    frames = []
    for i, n in enumerate(sizes):
        frames.append(make_frame(f"f{i:02d}", [f"f{i:02d}p{j}" for j in range(n)]))
    return frames


def _build_gallery(frames: list[Frame], rng: random.Random) -> FrameGallery:
    """Chain all frames plus a few chords; every element gets at least one
    partner so translations rarely lose mass."""
    gallery = gallery_of(frames)
    edges = [(i, i + 1) for i in range(len(frames) - 1)]
    edges += [(i, i + 2) for i in range(0, len(frames) - 2, 3)]
    for ia, ib in edges:
        fa, fb = frames[ia], frames[ib]
        pairs = []
        for la in fa.propositions:
            for _ in range(rng.randint(1, 2)):
                pairs.append((la, fb.propositions[rng.randrange(fb.size)]))
        for lb in fb.propositions:
            pairs.append((fa.propositions[rng.randrange(fa.size)], lb))
        gallery, _ = add_relation(gallery, fa, fb, pairs)
    return gallery


def _random_assignments(frame: Frame, rng: random.Random, max_focal: int):
    count = rng.randint(1, max_focal)
    chosen: dict[int, float] = {}
    for _ in range(count):
        width = rng.randint(1, min(12, frame.size))
        members = rng.sample(range(frame.size), width)
        bits = 0
        for m in members:
            bits |= 1 << m
        chosen[bits] = chosen.get(bits, 0.0) + rng.random()
    total = sum(chosen.values())
    committed = rng.uniform(0.5, 0.95)
    return [
        (frame.prop_set([i for i in range(frame.size) if b >> i & 1]), v / total * committed)
        for b, v in sorted(chosen.items())
    ]


def run_bench(cfg: BenchConfig | None = None) -> BenchResult:
    cfg = cfg or BenchConfig()
    rng = random.Random(cfg.seed)

    t0 = time.perf_counter()
    frames = _build_frames(cfg, rng)
    gallery = _build_gallery(frames, rng)
    kb = KnowledgeBase(gallery, (), KbMeta("bench", "1", "1970-01-01T00:00:00Z"))
    session = engine.new_session(kb, auto_discount=AutoDiscountConfig())
    result = BenchResult(
        config=cfg,
        frame_sizes=[f.size for f in frames],
        mean_frame_size=sum(f.size for f in frames) / len(frames),
    )
    result.phase_seconds["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    entered: list[str] = []
    confidences = [Confidence.CERTAIN, Confidence.PROBABLE, Confidence.POSSIBLE]
    for i in range(cfg.boes):
        frame = frames[rng.randrange(len(frames))]
        source = SourceMeta(
            name=f"sensor-{i:02d}",
            confidence=confidences[rng.randrange(3)],
            entry_path=EntryPath.AUTOMATED_FEED,
        )
        entered.append(
            engine.submit_boe(
                session,
                frame.id,
                _random_assignments(frame, rng, cfg.max_focal_sets),
                source,
            )
        )
    result.phase_seconds["enter"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(cfg.discounts):
        engine.run_discount(session, entered[rng.randrange(len(entered))], rng.uniform(0.05, 0.6))
    result.phase_seconds["discount"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(cfg.translations):
        node_id = entered[rng.randrange(len(entered))]
        current = session.node(node_id).boe.frame_id
        target = current
        while target == current:
            target = frames[rng.randrange(len(frames))].id
        engine.run_translate(session, node_id, target)
    result.phase_seconds["translate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rules = [FusionRule.DEMPSTER, FusionRule.SMETS, FusionRule.DEPENDENT]
    for i in range(cfg.fusions):
        group = rng.sample(entered, rng.randint(2, min(3, len(entered))))
        target = frames[rng.randrange(len(frames))].id
        engine.run_fusion(session, group, rules[i % 3], target)
    result.phase_seconds["fuse"] = time.perf_counter() - t0

    h = hashlib.sha256()
    for node_id in sorted(session.nodes):
        h.update(engine.node_digest(session.nodes[node_id]).encode())
    result.digest = h.hexdigest()
    result.node_count = len(session.nodes)
    return result

"""Shared generators and conversion helpers for the test suite."""

from __future__ import annotations

import random
import string

import pytest

from horizon.compat import FrameGallery, add_relation, gallery_of
from horizon.core import BOE, Confidence, Frame, SourceMeta, make_boe, make_frame


def setmap(boe: BOE, frame: Frame) -> dict[frozenset, float]:
    """Convert a BOE to the frozenset-of-labels form the oracles use."""
    return {frozenset(ps.labels(frame)): v for ps, v in boe.masses.items()}


def random_frame(rng: random.Random, n: int, frame_id: str = "f") -> Frame:
    return make_frame(frame_id, [string.ascii_uppercase[i % 26] + str(i // 26) for i in range(n)])


def random_boe(
    rng: random.Random,
    frame: Frame,
    *,
    max_focal: int = 4,
    theta_min: float = 0.0,
    source_name: str = "src",
    confidence: Confidence = Confidence.PROBABLE,
    boe_id: str | None = None,
) -> BOE:
    """A random closed-world BOE with at most ``max_focal`` nonempty focal
    sets; at least ``theta_min`` mass is left uncommitted."""
    count = rng.randint(1, max_focal)
    weights: dict[int, float] = {}
    for _ in range(count):
        bits = 0
        while bits == 0:
            bits = rng.getrandbits(frame.size) & ((1 << frame.size) - 1)
        weights[bits] = weights.get(bits, 0.0) + rng.random() + 0.05
    total = sum(weights.values())
    committed = 1.0 - theta_min if theta_min > 0.0 else rng.uniform(0.3, 1.0)
    assignments = [
        (frame.prop_set([i for i in range(frame.size) if b >> i & 1]), v / total * committed)
        for b, v in sorted(weights.items())
    ]
    return make_boe(
        frame,
        assignments,
        SourceMeta(source_name, confidence),
        boe_id=boe_id,
    )


def random_gallery(
    rng: random.Random, n_frames: int, *, max_size: int = 6
) -> tuple[FrameGallery, list[Frame]]:
    """A random connected-or-not gallery: a spanning tree over a random
    subset of frames plus a few extra chords; some frames may stay
    isolated."""
    frames = [
        make_frame(f"g{i}", [f"g{i}p{j}" for j in range(rng.randint(2, max_size))])
        for i in range(n_frames)
    ]
    gallery = gallery_of(frames)
    connected = [0]
    for i in range(1, n_frames):
        if rng.random() < 0.85:
            other = connected[rng.randrange(len(connected))]
            gallery = _link(rng, gallery, frames[i], frames[other])
            connected.append(i)
    for _ in range(n_frames // 3):
        if len(connected) >= 2:
            a, b = rng.sample(connected, 2)
            if gallery.relation_between(frames[a].id, frames[b].id) is None:
                gallery = _link(rng, gallery, frames[a], frames[b])
    return gallery, frames


def _link(rng: random.Random, gallery: FrameGallery, fa: Frame, fb: Frame) -> FrameGallery:
    pairs = []
    for la in fa.propositions:
        for _ in range(rng.randint(1, 2)):
            pairs.append((la, fb.propositions[rng.randrange(fb.size)]))
    gallery, _ = add_relation(gallery, fa, fb, pairs)
    return gallery


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260811)

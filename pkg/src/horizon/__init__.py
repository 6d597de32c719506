"""Horizon: an evidential-reasoning engine and decision aid.

Represent uncertain evidence as bodies of evidence over frames of
discernment; discount it by source credibility, translate it across
compatibility-related frames, fuse it with one of three rules, and explain
which evidence drove the conclusion.
"""

from .core import (
    BOE,
    EXPLANATION_FRAME_CAP,
    BoeKind,
    ConclusionReport,
    ConclusionRow,
    Confidence,
    EntryPath,
    Frame,
    PropSet,
    SourceMeta,
    belief,
    commonality,
    conclusion_report,
    info_measure,
    make_boe,
    make_frame,
    plausibility,
    vacuous_boe,
)
from .compat import (
    CompatibilityRelation,
    Direction,
    FrameGallery,
    Translated,
    add_relation,
    gallery_of,
    image,
    make_relation,
    translate,
    translate_to,
    translation_path,
)
from .fusion import (
    AutoDiscountConfig,
    FusionRule,
    ZadehComparison,
    auto_discount,
    discount,
    fuse,
    fuse_dempster,
    fuse_dependent,
    fuse_smets,
    zadeh_guard_demo,
)
from .explain import (
    InfluenceEntry,
    InfluenceReport,
    explanation_text,
    influence,
    leave_one_out_deltas,
)
from .kb import (
    KnowledgeBase,
    KbMeta,
    edit_relation,
    load_kb,
    sample_kb,
    sample_kb_path,
    save_kb,
)
from .errors import HorizonError

__version__ = "1.0.0"

__all__ = [
    "BOE",
    "EXPLANATION_FRAME_CAP",
    "AutoDiscountConfig",
    "BoeKind",
    "CompatibilityRelation",
    "ConclusionReport",
    "ConclusionRow",
    "Confidence",
    "Direction",
    "EntryPath",
    "Frame",
    "FrameGallery",
    "FusionRule",
    "HorizonError",
    "InfluenceEntry",
    "InfluenceReport",
    "KbMeta",
    "KnowledgeBase",
    "PropSet",
    "SourceMeta",
    "Translated",
    "ZadehComparison",
    "add_relation",
    "auto_discount",
    "belief",
    "commonality",
    "conclusion_report",
    "discount",
    "edit_relation",
    "explanation_text",
    "fuse",
    "fuse_dempster",
    "fuse_dependent",
    "fuse_smets",
    "gallery_of",
    "image",
    "influence",
    "info_measure",
    "leave_one_out_deltas",
    "load_kb",
    "make_boe",
    "make_frame",
    "make_relation",
    "plausibility",
    "sample_kb",
    "sample_kb_path",
    "save_kb",
    "translate",
    "translate_to",
    "translation_path",
    "vacuous_boe",
    "zadeh_guard_demo",
]

"""KB loading, validation, canonical serialization and editing."""

from __future__ import annotations

import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horizon.compat import add_relation, gallery_of
from horizon.core import Confidence, EntryPath, SourceMeta, make_boe, make_frame
from horizon.errors import KbParseError, KbValidationError, PairNotFoundError
from horizon.kb import (
    KbMeta,
    KnowledgeBase,
    edit_relation,
    kb_from_document,
    kb_to_document,
    load_kb,
    sample_kb,
    save_kb,
)


def minimal_doc():
    return {
        "version": "1",
        "meta": {"name": "t", "version": "1", "created": "2026-01-01T00:00:00Z"},
        "frames": [{"id": "f", "label": "f", "propositions": ["a", "b"]}],
        "relations": [],
        "static_boes": [],
    }


class TestLoadKb:
    def test_sample_kb_loads(self):
        kb = sample_kb()
        assert len(kb.gallery.frames) == 6
        assert len(kb.gallery.relations) >= 5
        classification = kb.frame("classification")
        assert "Oberon" in classification.propositions
        country = kb.frame("country")
        rel = kb.gallery.relation_between("classification", "country")
        oberon = classification.subset(["Oberon"])
        from horizon.compat import Direction, image

        partners = image(rel, oberon, Direction.A_TO_B).labels(country)
        assert partners == ("Australia", "Canada")
        assert kb.frame("type").propositions[0] == "SSK"
        assert "17" in kb.frame("speed").propositions
        assert "2" in kb.frame("diesels").propositions
        assert "1" in kb.frame("shafts").propositions

    def test_empty_frames_rejected(self):
        doc = minimal_doc()
        doc["frames"] = []
        with pytest.raises(KbValidationError, match="at least one frame"):
            kb_from_document(doc)

    def test_mass_sum_violation_names_boe(self):
        doc = minimal_doc()
        doc["static_boes"] = [
            {
                "id": "bad-boe",
                "frame": "f",
                "masses": [
                    {"set": ["a"], "mass": 0.8},
                    {"set": ["b"], "mass": 0.4},
                ],
                "source": {"name": "s", "confidence": "probable", "independent": True},
            }
        ]
        with pytest.raises(KbValidationError, match="bad-boe") as err:
            kb_from_document(doc)
        assert err.value.detail.get("total") == pytest.approx(1.2)

    def test_parse_error_carries_position(self):
        with pytest.raises(KbParseError) as err:
            load_kb(b'{"version": "1", \n "meta": }')
        assert err.value.detail["line"] == 2

    def test_unknown_relation_label(self):
        doc = minimal_doc()
        doc["relations"] = [{"a": "f", "b": "f2", "pairs": [["a", "zz"]]}]
        doc["frames"].append({"id": "f2", "label": "f2", "propositions": ["x"]})
        with pytest.raises(KbValidationError, match="zz"):
            kb_from_document(doc)

    def test_wrong_version_rejected(self):
        doc = minimal_doc()
        doc["version"] = "2"
        with pytest.raises(KbValidationError, match="version"):
            kb_from_document(doc)

    def test_reads_binary_stream(self):
        kb = load_kb(io.BytesIO(save_kb(sample_kb())))
        assert len(kb.gallery.frames) == 6

    def test_malformed_documents_always_diagnosed(self):
        bad_docs = [
            [],
            {"version": "1"},
            {"version": "1", "meta": {"name": "x", "version": "1", "created": "c"}, "frames": [{"id": "f"}]},
            {"version": "1", "meta": {"name": "x", "version": "1", "created": "c"},
             "frames": [{"id": "f", "propositions": ["a", "a"]}]},
            {"version": "1", "meta": {"name": "x", "version": "1", "created": "c"},
             "frames": [{"id": "f", "propositions": ["a"]}],
             "relations": [{"a": "f", "b": "f", "pairs": []}]},
            {"version": "1", "meta": {"name": "x", "version": "1", "created": "c"},
             "frames": [{"id": "f", "propositions": ["a"]}],
             "static_boes": [{"id": "b", "frame": "f", "masses": [{"set": ["a"], "mass": "x"}],
                              "source": {"name": "s"}}]},
        ]
        for doc in bad_docs:
            with pytest.raises(KbValidationError):
                kb_from_document(doc)


class TestSaveKb:
    def test_second_save_byte_stable(self):
        kb = sample_kb()
        first = save_kb(kb)
        second = save_kb(load_kb(first))
        assert first == second

    def test_round_trip_identity(self):
        kb = sample_kb()
        assert load_kb(save_kb(kb)) == kb

    def test_large_frame_round_trips_in_order(self):
        frame = make_frame("big", [f"prop-{i}" for i in range(352)])
        gallery = gallery_of([frame])
        kb = KnowledgeBase(gallery, (), KbMeta("big", "1", "2026-01-01T00:00:00Z"))
        loaded = load_kb(save_kb(kb))
        assert loaded.frame("big").propositions == frame.propositions

    def test_unicode_labels_round_trip(self):
        frame = make_frame("väder", ["molnigt", "söligt", "Önskan", "雨"])
        gallery = gallery_of([frame])
        kb = KnowledgeBase(gallery, (), KbMeta("façade", "1", "2026-01-01T00:00:00Z"))
        loaded = load_kb(save_kb(kb))
        assert loaded == kb

    def test_mass_precision_survives(self):
        frame = make_frame("f", ["a", "b"])
        mass = 1.0 / 3.0
        boe = make_boe(
            frame,
            [(frame.subset(["a"]), mass)],
            SourceMeta("s", Confidence.POSSIBLE, entry_path=EntryPath.STATIC_KB),
            boe_id="third",
        )
        kb = KnowledgeBase(gallery_of([frame]), (boe,), KbMeta("p", "1", "c"))
        loaded = load_kb(save_kb(kb))
        assert loaded.static_boes[0].mass_of(frame.subset(["a"])) == mass

    def test_sink_receives_payload(self, tmp_path):
        path = tmp_path / "out.horizon.json"
        with open(path, "wb") as fh:
            payload = save_kb(sample_kb(), fh)
        assert path.read_bytes() == payload


class TestEditRelation:
    def test_add_pair(self):
        kb = sample_kb()
        kb2 = edit_relation(kb, "classification", "country", add=[("Kilo", "Australia")])
        rel = kb2.gallery.relation_between("classification", "country")
        classification = kb2.frame("classification")
        country = kb2.frame("country")
        pair = (classification.index_of("Kilo"), country.index_of("Australia"))
        assert pair in rel.pairs
        # original untouched
        assert pair not in kb.gallery.relation_between("classification", "country").pairs

    def test_add_then_remove_is_identity(self):
        kb = sample_kb()
        kb2 = edit_relation(kb, "classification", "country", add=[("Kilo", "Australia")])
        kb3 = edit_relation(kb2, "classification", "country", remove=[("Kilo", "Australia")])
        assert kb3.gallery.relation_between("classification", "country").pairs == \
            kb.gallery.relation_between("classification", "country").pairs

    def test_remove_missing_pair_rejected(self):
        kb = sample_kb()
        with pytest.raises(PairNotFoundError, match="Kilo"):
            edit_relation(kb, "classification", "country", remove=[("Kilo", "Canada")])

    def test_edit_accepts_reversed_frame_order(self):
        kb = sample_kb()
        kb2 = edit_relation(kb, "country", "classification", add=[("Australia", "Kilo")])
        rel = kb2.gallery.relation_between("classification", "country")
        classification = kb2.frame("classification")
        country = kb2.frame("country")
        assert (classification.index_of("Kilo"), country.index_of("Australia")) in rel.pairs


# -- property: round-trip over generated KBs ---------------------------------

label_st = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    min_size=1,
    max_size=12,
)


@st.composite
def kb_documents(draw):
    n_frames = draw(st.integers(min_value=1, max_value=4))
    frames = []
    used_ids = set()
    for i in range(n_frames):
        props = draw(
            st.lists(label_st, min_size=1, max_size=5, unique=True)
        )
        fid = f"frame{i}"
        used_ids.add(fid)
        frames.append(make_frame(fid, props, draw(label_st)))
    gallery = gallery_of(frames)
    for i in range(n_frames - 1):
        if draw(st.booleans()):
            fa, fb = frames[i], frames[i + 1]
            max_pairs = min(3, fa.size * fb.size)
            pair_indices = draw(
                st.lists(
                    st.tuples(
                        st.integers(0, fa.size - 1), st.integers(0, fb.size - 1)
                    ),
                    max_size=max_pairs,
                )
            )
            pairs = [
                (fa.propositions[ia], fb.propositions[ib]) for ia, ib in pair_indices
            ]
            gallery, _ = add_relation(gallery, fa, fb, pairs)
    static = []
    if draw(st.booleans()):
        frame = frames[0]
        mass = draw(st.floats(min_value=0.01, max_value=0.95, allow_nan=False))
        static.append(
            make_boe(
                frame,
                [(frame.prop_set([0]), mass)],
                SourceMeta(draw(label_st), entry_path=EntryPath.STATIC_KB),
                boe_id="static0",
            )
        )
    return KnowledgeBase(
        gallery, tuple(static), KbMeta(draw(label_st), "1", "2026-01-01T00:00:00Z")
    )


@given(kb_documents())
@settings(max_examples=60, deadline=None)
def test_generated_kb_round_trip(kb):
    payload = save_kb(kb)
    loaded = load_kb(payload)
    assert loaded == kb
    assert save_kb(loaded) == payload


def test_document_is_plain_json():
    doc = kb_to_document(sample_kb())
    json.dumps(doc)  # no exotic types
    assert doc["version"] == "1"
    assert [f["id"] for f in doc["frames"]][0] == "classification"

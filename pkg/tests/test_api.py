"""HTTP veneer: endpoint contracts, error codes, schemas and the
string-serialized full-precision payloads."""

from __future__ import annotations

import jsonschema
import pytest
from fastapi.testclient import TestClient

from horizon import engine
from horizon.api import create_app
from horizon.core import SourceMeta
from horizon.fusion import AutoDiscountConfig
from horizon.kb import sample_kb
from horizon.schemas import RESPONSE_SCHEMAS


@pytest.fixture
def session():
    return engine.new_session(sample_kb(), auto_discount=AutoDiscountConfig(enabled=False))


@pytest.fixture
def client(session):
    return TestClient(create_app(session))


def check(kind, payload):
    jsonschema.validate(payload, RESPONSE_SCHEMAS[kind])
    return payload


def submit(client, frame, masses, name="src", confidence="probable"):
    response = client.post(
        "/api/v1/boes",
        json={
            "frame": frame,
            "masses": masses,
            "source": {"name": name, "confidence": confidence},
        },
    )
    assert response.status_code == 201, response.text
    return check("node_created", response.json())["node_id"]


class TestCollections:
    def test_frames_listing(self, client):
        payload = check("frames", client.get("/api/v1/frames").json())
        ids = [f["id"] for f in payload["frames"]]
        assert len(ids) >= 6
        assert ids[0] == "classification"

    def test_relations_include_oberon_ssk(self, client):
        payload = check("relations", client.get("/api/v1/relations").json())
        all_pairs = [pair for rel in payload["relations"] for pair in rel["pairs"]]
        assert ["Oberon", "SSK"] in all_pairs

    def test_empty_boes(self, client):
        payload = check("boes", client.get("/api/v1/boes").json())
        assert payload["nodes"] == []

    def test_meta(self, client):
        payload = check("meta", client.get("/api/v1/meta").json())
        assert payload["log_position"] == 0


class TestSubmit:
    def test_created(self, client):
        node_id = submit(client, "type", [{"set": ["SSK"], "mass": 0.7}])
        payload = check("boes", client.get("/api/v1/boes").json())
        assert payload["nodes"][0]["node_id"] == node_id

    def test_mass_sum_exceeded(self, client):
        response = client.post(
            "/api/v1/boes",
            json={
                "frame": "type",
                "masses": [
                    {"set": ["SSK"], "mass": 0.8},
                    {"set": ["SSN"], "mass": 0.4},
                ],
                "source": {"name": "s"},
            },
        )
        assert response.status_code == 422
        body = check("error", response.json())
        assert body["code"] == "mass_sum_exceeded"

    def test_unknown_frame(self, client):
        response = client.post(
            "/api/v1/boes",
            json={"frame": "nope", "masses": [], "source": {"name": "s"}},
        )
        assert response.status_code == 404
        assert check("error", response.json())["code"] == "unknown_frame"

    def test_malformed_body(self, client):
        response = client.post(
            "/api/v1/boes", content=b"{not json", headers={"content-type": "application/json"}
        )
        assert response.status_code == 422
        assert check("error", response.json())["code"] == "invalid_request"


class TestOps:
    def test_fuse_created(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.6}])
        n2 = submit(client, "type", [{"set": ["SSK"], "mass": 0.5}])
        response = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "dempster", "target": "type"},
        )
        assert response.status_code == 201
        check("node_created", response.json())

    def test_total_conflict_409(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 1.0}])
        n2 = submit(client, "type", [{"set": ["SSN"], "mass": 1.0}])
        response = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "dempster", "target": "type"},
        )
        assert response.status_code == 409
        assert check("error", response.json())["code"] == "total_conflict"

    def test_unreachable_frame_409(self, session):
        # strip the relations so classification is unreachable from type
        from horizon.compat import FrameGallery
        from types import MappingProxyType
        import dataclasses

        bare = dataclasses.replace(
            session.kb,
            gallery=FrameGallery(session.kb.gallery.frames, MappingProxyType({})),
        )
        lone = engine.new_session(bare, auto_discount=AutoDiscountConfig(enabled=False))
        client = TestClient(create_app(lone))
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.6}])
        n2 = submit(client, "type", [{"set": ["SSK"], "mass": 0.5}])
        response = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "dempster", "target": "classification"},
        )
        assert response.status_code == 409
        assert check("error", response.json())["code"] == "unreachable_frame"

    def test_invalid_rate_422(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.6}])
        response = client.post("/api/v1/ops/discount", json={"node": n1, "rate": 1.2})
        assert response.status_code == 422
        assert check("error", response.json())["code"] == "invalid_rate"

    def test_discount_and_translate(self, client):
        n1 = submit(client, "classification", [{"set": ["Oberon"], "mass": 0.6}])
        r1 = client.post("/api/v1/ops/discount", json={"node": n1, "rate": 0.2})
        assert r1.status_code == 201
        r2 = client.post(
            "/api/v1/ops/translate",
            json={"node": r1.json()["node_id"], "target": "type"},
        )
        assert r2.status_code == 201
        node = check("node", client.get(f"/api/v1/nodes/{r2.json()['node_id']}").json())
        assert node["frame"] == "type"
        assert node["op"]["kind"] == "translated"

    def test_auto_discount_override_is_logged_toggle(self, client, session):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 1.0}])
        n2 = submit(client, "type", [{"set": ["SSK"], "mass": 1.0}])
        response = client.post(
            "/api/v1/ops/fuse",
            json={
                "nodes": [n1, n2],
                "rule": "dempster",
                "target": "type",
                "auto_discount": True,
            },
        )
        assert response.status_code == 201
        assert session.auto_discount.enabled
        assert any(r["op"] == "set_auto_discount" for r in session.log)
        # the pipeline discounted both probable inputs at 0.2
        discounted = [n for n in session.nodes.values() if n.op.kind == "auto_discounted"]
        assert len(discounted) == 2


class TestReports:
    def make_conflicting(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.7}], name="Eye-Witness")
        n2 = submit(client, "type", [{"set": ["SSN"], "mass": 0.6}], name="Sonar")
        response = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "smets", "target": "type"},
        )
        return response.json()["node_id"]

    def test_smets_conclusion_unknown_mass(self, client):
        fused = self.make_conflicting(client)
        payload = check("conclusion", client.get(f"/api/v1/nodes/{fused}/conclusion").json())
        assert payload["unknown_mass"] == format(0.7 * 0.6, ".17g")
        assert float(payload["unknown_mass"]) == 0.42

    def test_conclusion_values_are_17_digit_strings(self, client, session):
        fused = self.make_conflicting(client)
        payload = client.get(f"/api/v1/nodes/{fused}/conclusion").json()
        report = engine.conclusion_of(session, fused)
        frame = session.kb.frame(session.node(fused).boe.frame_id)
        for api_row, row in zip(payload["rows"], report.rows):
            assert api_row["statement"] == list(row.statement.labels(frame))
            assert api_row["support"] == format(row.support, ".17g")
            assert api_row["uncertainty"] == format(row.uncertainty, ".17g")
            assert api_row["against"] == format(row.against, ".17g")

    def test_explanation_sorted_with_most_influential(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.9}], name="Eye-Witness")
        n2 = submit(client, "type", [{"set": ["SSK"], "mass": 0.2}], name="Sonar")
        n3 = submit(client, "type", [], name="Rumor")
        fused = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2, n3], "rule": "smets", "target": "type"},
        ).json()["node_id"]
        payload = check("explanation", client.get(f"/api/v1/nodes/{fused}/explanation").json())
        influences = [float(e["influence"]) for e in payload["entries"]]
        assert influences == sorted(influences, reverse=True)
        assert payload["most_influential"] == payload["entries"][0]["boe_id"]
        assert payload["entries"][0]["source"] == "Eye-Witness"
        assert payload["text"].startswith("Eye-Witness")

    def test_unknown_node_404(self, client):
        for path in ["/api/v1/nodes/n99/conclusion", "/api/v1/nodes/n99/explanation"]:
            response = client.get(path)
            assert response.status_code == 404
            assert check("error", response.json())["code"] == "unknown_node"

    def test_whatif_returns_new_node(self, client):
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.9}])
        n2 = submit(client, "type", [{"set": ["SSK"], "mass": 0.3}])
        n3 = submit(client, "type", [{"set": ["SSN"], "mass": 0.2}])
        fused = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2, n3], "rule": "dempster", "target": "type"},
        ).json()["node_id"]
        explanation = client.get(f"/api/v1/nodes/{fused}/explanation").json()
        top = explanation["most_influential"]
        # the explanation names post-pipeline nodes; map back to the request
        # input by lineage
        response = client.post(
            "/api/v1/whatif", json={"recompute": fused, "disable": [top]}
        )
        assert response.status_code == 201
        new_id = check("node_created", response.json())["node_id"]
        assert new_id != fused
        before = client.get(f"/api/v1/nodes/{fused}/conclusion").json()
        after = client.get(f"/api/v1/nodes/{new_id}/conclusion").json()
        assert before != after


class TestInvariants:
    def test_read_your_writes(self, client):
        node_id = submit(client, "type", [{"set": ["SSK"], "mass": 0.7}])
        listed = client.get("/api/v1/boes").json()["nodes"]
        assert any(n["node_id"] == node_id for n in listed)

    def test_log_position_header_monotonic(self, client):
        p0 = int(client.get("/api/v1/frames").headers["X-Log-Position"])
        submit(client, "type", [{"set": ["SSK"], "mass": 0.7}])
        p1 = int(client.get("/api/v1/frames").headers["X-Log-Position"])
        assert p1 == p0 + 1

    def test_api_is_pure_veneer(self, client, session):
        """A script of API calls must equal the same engine-level calls."""
        n1 = submit(client, "type", [{"set": ["SSK"], "mass": 0.6}])
        n2 = submit(client, "type", [{"set": ["SSN"], "mass": 0.3}])
        fused = client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "dempster", "target": "type"},
        ).json()["node_id"]

        twin = engine.new_session(sample_kb(), auto_discount=AutoDiscountConfig(enabled=False))
        frame = twin.kb.frame("type")
        m1 = engine.submit_boe(
            twin, "type", [(frame.subset(["SSK"]), 0.6)], SourceMeta("src")
        )
        m2 = engine.submit_boe(
            twin, "type", [(frame.subset(["SSN"]), 0.3)], SourceMeta("src")
        )
        f2 = engine.run_fusion(twin, [m1, m2], "dempster", "type")
        assert dict(twin.node(f2).boe.masses) == dict(session.node(fused).boe.masses)

    def test_all_node_payloads_validate(self, client):
        n1 = submit(client, "classification", [{"set": ["Oberon"], "mass": 0.6}])
        n2 = submit(client, "classification", [{"set": ["Collins"], "mass": 0.5}])
        client.post("/api/v1/ops/discount", json={"node": n1, "rate": 0.25})
        client.post(
            "/api/v1/ops/fuse",
            json={"nodes": [n1, n2], "rule": "dempster", "target": "type"},
        )
        payload = check("boes", client.get("/api/v1/boes").json())
        for node in payload["nodes"]:
            check("node", node)

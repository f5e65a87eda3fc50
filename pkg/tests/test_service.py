import json
import time

import pytest
from fastapi.testclient import TestClient

from lmexplorer.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path / "data"))
    return TestClient(app)


def _create(client, seed=7, **kwargs):
    payload = {"scene": "crossing_disks", "bundle": "crossing_disks", "seed": seed}
    payload.update(kwargs)
    resp = client.post("/api/sessions", json=payload)
    assert resp.status_code == 201, resp.text
    return resp.json()


def test_create_session_fixture(client):
    body = _create(client)
    assert body["snapshot"]["root"] == "n0"
    assert len(body["snapshot"]["nodes"]) == 1


def test_create_session_unknown_fixture(client):
    resp = client.post("/api/sessions", json={"scene": "nope", "bundle": "crossing_disks"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "fixture_unknown"


def test_create_session_malformed_bundle(client):
    resp = client.post(
        "/api/sessions",
        json={"scene": "crossing_disks", "bundle": {"levels": [["disk1"]]}},
    )
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "invalid_session"
    assert "level" in body["message"]


def test_create_session_deterministic(client):
    a = _create(client, seed=42)
    b = _create(client, seed=42)
    assert json.dumps(a["snapshot"], sort_keys=True) == json.dumps(b["snapshot"], sort_keys=True)


def test_expand_sync_and_snapshot(client):
    sid = _create(client)["session"]
    resp = client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 1500})
    assert resp.status_code == 200
    body = resp.json()
    assert body["report"]["new_nodes"]
    tree = client.get(f"/api/sessions/{sid}/tree").json()
    assert len(tree["nodes"]) == len(body["snapshot"]["nodes"])


def test_expand_unknown_node(client):
    sid = _create(client)["session"]
    resp = client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n9", "samples": 10})
    assert resp.status_code == 404


def test_expand_unknown_session(client):
    resp = client.post("/api/sessions/zzz/expand", json={"node_id": "n0", "samples": 10})
    assert resp.status_code == 404


def test_expand_needs_exactly_one_budget(client):
    sid = _create(client)["session"]
    resp = client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0"})
    assert resp.status_code == 422
    resp = client.post(
        f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 5, "seconds": 1.0}
    )
    assert resp.status_code == 422


def test_expand_level_exhausted(client):
    sid = _create(client)["session"]
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 2000})
    tree = client.get(f"/api/sessions/{sid}/tree").json()
    l1 = next(n["id"] for n in tree["nodes"] if n["level"] == 1)
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": l1, "samples": 2000})
    tree = client.get(f"/api/sessions/{sid}/tree").json()
    leaf = next(n["id"] for n in tree["nodes"] if n["level"] == 2)
    resp = client.post(f"/api/sessions/{sid}/expand", json={"node_id": leaf, "samples": 10})
    assert resp.status_code == 422
    assert resp.json()["code"] == "level_exhausted"


def test_async_expansion_status_and_busy(client):
    sid = _create(client)["session"]
    before = client.get(f"/api/sessions/{sid}/tree").json()
    resp = client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "seconds": 0.8})
    assert resp.status_code == 202
    # concurrent expansion is rejected while in flight
    busy = client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 10})
    assert busy.status_code == 409
    # tree reads during expansion serve the pre-expansion snapshot
    during = client.get(f"/api/sessions/{sid}/tree").json()
    assert json.dumps(during, sort_keys=True) == json.dumps(before, sort_keys=True)
    status = client.get(f"/api/sessions/{sid}/status").json()
    assert status["state"] in ("expanding", "idle")
    deadline = time.time() + 30
    while time.time() < deadline:
        status = client.get(f"/api/sessions/{sid}/status").json()
        if status["state"] == "idle":
            break
        time.sleep(0.1)
    assert status["state"] == "idle"
    after = client.get(f"/api/sessions/{sid}/tree").json()
    assert len(after["nodes"]) >= len(before["nodes"])


def test_scene_document_for_rendering(client):
    sid = _create(client)["session"]
    doc = client.get(f"/api/sessions/{sid}/scene").json()
    assert doc["name"] == "crossing_disks"
    assert len(doc["render_robots"]) == 2
    bot = doc["render_robots"][0]
    assert bot["shape"]["type"] == "disk"
    assert len(bot["start"]) == 3  # x, y, theta
    assert bot["track"] is not None  # R1 robots expose their rail


def test_minimum_animation_payload(client):
    sid = _create(client)["session"]
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 1500})
    tree = client.get(f"/api/sessions/{sid}/tree").json()
    node = next(n["id"] for n in tree["nodes"] if n["level"] == 1)
    doc = client.get(f"/api/sessions/{sid}/minima/{node}").json()
    assert doc["steps"] == 200
    assert set(doc["robots"]) == {"disk1"}
    poses = doc["robots"]["disk1"]
    assert len(poses) == 200
    assert len(poses[0]) == 3
    # root has no path
    resp = client.get(f"/api/sessions/{sid}/minima/n0")
    assert resp.status_code == 404


def test_roadmap_payload(client):
    sid = _create(client)["session"]
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 800})
    doc = client.get(f"/api/sessions/{sid}/roadmaps/1").json()
    assert doc["level"] == 1
    assert len(doc["dense"]["vertices"]) > 2
    assert doc["sparse"]["vertices"]
    assert client.get(f"/api/sessions/{sid}/roadmaps/9").status_code == 404


TREE_SCHEMA = {
    "type": "object",
    "required": ["format", "root", "nodes"],
    "properties": {
        "format": {"const": "minima-tree/1"},
        "root": {"type": "string"},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "level", "parent", "children", "status", "cost", "path", "created_iteration"],
                "properties": {
                    "id": {"type": "string", "pattern": "^n[0-9]+$"},
                    "level": {"type": "integer", "minimum": 0},
                    "parent": {"type": ["string", "null"]},
                    "children": {"type": "array", "items": {"type": "string"}},
                    "status": {"enum": ["fresh", "expanded"]},
                    "cost": {"type": ["number", "null"]},
                    "path": {
                        "type": ["array", "null"],
                        "items": {"type": "array", "items": {"type": "number"}},
                    },
                    "created_iteration": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}

MINIMUM_SCHEMA = {
    "type": "object",
    "required": ["node", "level", "cost", "steps", "robots"],
    "properties": {
        "node": {"type": "string"},
        "level": {"type": "integer", "minimum": 1},
        "cost": {"type": "number"},
        "steps": {"type": "integer", "minimum": 2},
        "robots": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
            },
        },
    },
}


def test_documents_round_trip_schemas(client):
    import jsonschema

    sid = _create(client)["session"]
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 1200})
    tree = client.get(f"/api/sessions/{sid}/tree").json()
    jsonschema.validate(tree, TREE_SCHEMA)
    node = next(n["id"] for n in tree["nodes"] if n["level"] == 1)
    minimum = client.get(f"/api/sessions/{sid}/minima/{node}").json()
    jsonschema.validate(minimum, MINIMUM_SCHEMA)
    # per-robot pose arrays all share the declared step count
    lengths = {len(v) for v in minimum["robots"].values()}
    assert lengths == {minimum["steps"]}


def test_session_persisted(client, tmp_path):
    sid = _create(client)["session"]
    client.post(f"/api/sessions/{sid}/expand", json={"node_id": "n0", "samples": 300})
    stored = list((tmp_path / "data").glob("session-*.json"))
    assert stored
    doc = json.loads(stored[0].read_text())
    assert doc["format"] == "explorer-session/1"
    assert doc["events"]

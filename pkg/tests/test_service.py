from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

from conftest import DATA, FakeClock
from modelmate.dsl import parse_model
from modelmate.gateway import FunctionProvider, Gateway
from modelmate.service import create_app
from modelmate.sessionlog import HEADER

HOSPITAL_SOURCE = (DATA / "hospital.dm").read_text()


@pytest.fixture()
def client(mock_gateway, catalog):
    app = create_app(
        mock_gateway, catalog=catalog, debounce_seconds=0.0, clock=FakeClock()
    )
    return TestClient(app)


def _create(client: TestClient, **overrides) -> dict:
    body = {"modelSource": HOSPITAL_SOURCE, "mode": "OnRequest", "seed": 0}
    body.update(overrides)
    res = client.post("/sessions", json=body)
    assert res.status_code == 201, res.text
    return res.json()


def test_healthz(client):
    res = client.get("/healthz")
    assert res.status_code == 200
    assert res.json() == {"status": "ok"}


def test_create_returns_snapshot(client):
    created = _create(client)
    assert len(created["sessionId"]) == 12
    assert created["revision"] == 0
    assert created["mode"] == "OnRequest"
    model = created["model"]
    assert model["packageName"] == "HospitalSystem"
    assert [c["name"] for c in model["classes"]] == ["Hospital", "Staff", "Doctor"]
    hospital = model["classes"][0]
    assert {"name": "name", "typeName": "String"} in hospital["attributes"]
    assert model["associations"] == [
        {"source": "Hospital", "target": "Staff", "kind": "aggregation", "name": None}
    ]


def test_create_defaults_to_empty_no_assistance_model(client):
    res = client.post("/sessions", json={})
    assert res.status_code == 201
    body = res.json()
    assert body["mode"] == "NoAssistance"
    assert body["model"]["packageName"] == "Model"
    assert body["model"]["classes"] == []

    named = client.post("/sessions", json={"packageName": "Fresh"}).json()
    assert named["model"]["packageName"] == "Fresh"


def test_create_accepts_log_token_mode_spelling(client):
    created = _create(client, mode="at-end")
    assert created["mode"] == "AtEnd"


def test_create_rejects_unparseable_source(client):
    res = client.post("/sessions", json={"modelSource": "class {"})
    assert res.status_code == 422
    error = res.json()["error"]
    assert error["code"] == "parse-error"
    assert error["httpStatus"] == 422


def test_unknown_session_is_404(client):
    res = client.get("/sessions/doesnotexist/model")
    assert res.status_code == 404
    assert res.json() == {
        "error": {
            "code": "unknown-session",
            "message": "no session 'doesnotexist'",
            "httpStatus": 404,
        }
    }
    assert client.post("/sessions/nope/edits", json={"kind": "create-class", "name": "X"}).status_code == 404


def test_edit_bumps_revision_and_shows_in_model(client):
    sid = _create(client)["sessionId"]
    res = client.post(
        f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Ward"}
    )
    assert res.status_code == 200
    assert res.json() == {"revision": 1}

    snapshot = client.get(f"/sessions/{sid}/model").json()
    assert snapshot["revision"] == 1
    assert snapshot["ended"] is False
    assert "Ward" in [c["name"] for c in snapshot["model"]["classes"]]


def test_edit_errors_map_to_codes(client):
    sid = _create(client)["sessionId"]

    duplicate = client.post(
        f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Hospital"}
    )
    assert duplicate.status_code == 422
    assert duplicate.json()["error"]["code"] == "duplicate-name"

    unknown_kind = client.post(
        f"/sessions/{sid}/edits", json={"kind": "explode", "name": "X"}
    )
    assert unknown_kind.status_code == 422
    assert unknown_kind.json()["error"]["code"] == "invalid-value"

    missing_field = client.post(
        f"/sessions/{sid}/edits", json={"kind": "create-attribute", "name": "age"}
    )
    assert missing_field.status_code == 422
    assert missing_field.json()["error"]["code"] == "invalid-value"

    assert client.get(f"/sessions/{sid}/model").json()["revision"] == 0


def test_polling_since_revision(client):
    sid = _create(client)["sessionId"]
    assert client.get(f"/sessions/{sid}/model", params={"sinceRevision": 0}).status_code == 204

    client.post(f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Ward"})
    fresh = client.get(f"/sessions/{sid}/model", params={"sinceRevision": 0})
    assert fresh.status_code == 200
    assert fresh.json()["revision"] == 1
    assert client.get(f"/sessions/{sid}/model", params={"sinceRevision": 1}).status_code == 204


def test_on_request_suggestion_flow(client):
    sid = _create(client)["sessionId"]
    res = client.post(f"/sessions/{sid}/suggestions/request", json={})
    assert res.status_code == 200
    payload = res.json()
    assert payload["revision"] == 1

    classes = payload["classes"]
    assert [c["payload"]["name"] for c in classes] == ["Address", "Appointment", "Patient"]
    assert all(c["confidence"] == 3 for c in classes)
    assert all(c["kind"] == "class" for c in classes)

    attributes = payload["attributes"]
    assert len(attributes) == 13
    assert all(a["confidence"] == 3 for a in attributes)
    assert not any(a["payload"]["typeWarning"] for a in attributes)

    (assoc,) = payload["associations"]
    assert assoc["payload"] == {
        "source": "Doctor",
        "target": "Staff",
        "kind": "inheritance",
        "name": None,
    }
    assert payload["errors"] == []

    # the read-only endpoint serves the same store snapshot
    mirrored = client.get(f"/sessions/{sid}/suggestions").json()
    assert mirrored["classes"] == classes

    patient = next(c for c in classes if c["payload"]["name"] == "Patient")
    accepted = client.post(
        f"/sessions/{sid}/suggestions/{patient['candidateId']}/accept"
    )
    assert accepted.status_code == 200
    assert accepted.json() == {"revision": 2}
    names = [
        c["name"] for c in client.get(f"/sessions/{sid}/model").json()["model"]["classes"]
    ]
    assert "Patient" in names

    missing = client.post(f"/sessions/{sid}/suggestions/{patient['candidateId']}/accept")
    assert missing.status_code == 404
    assert missing.json()["error"]["code"] == "unknown-candidate"


def test_dismiss_removes_candidate(client):
    sid = _create(client)["sessionId"]
    payload = client.post(f"/sessions/{sid}/suggestions/request", json={}).json()
    target = payload["classes"][0]["candidateId"]

    assert client.post(f"/sessions/{sid}/suggestions/{target}/dismiss").json() == {
        "revision": 2
    }
    again = client.post(f"/sessions/{sid}/suggestions/{target}/dismiss")
    assert again.status_code == 404


def test_request_in_wrong_mode_is_409(client):
    sid = _create(client, mode="NoAssistance")["sessionId"]
    res = client.post(f"/sessions/{sid}/suggestions/request", json={})
    assert res.status_code == 409
    assert res.json()["error"]["code"] == "wrong-mode"

    finalize = client.post(f"/sessions/{sid}/finalize")
    assert finalize.status_code == 409


def test_finalize_reinforces_batch_candidates(client):
    sid = _create(client, mode="AtEnd")["sessionId"]
    first = client.post(f"/sessions/{sid}/finalize").json()
    assert {c["payload"]["name"] for c in first["classes"]} == {
        "Address",
        "Appointment",
        "Patient",
    }
    assert all(c["confidence"] == 3 for c in first["classes"])

    second = client.post(f"/sessions/{sid}/finalize").json()
    assert all(c["confidence"] == 6 for c in second["classes"])
    assert second["revision"] == 2


def test_mode_switch_roundtrip(client):
    sid = _create(client, mode="NoAssistance")["sessionId"]
    res = client.post(f"/sessions/{sid}/mode", json={"mode": "OnRequest"})
    assert res.status_code == 200
    assert res.json() == {"revision": 1, "mode": "OnRequest"}
    assert client.post(f"/sessions/{sid}/suggestions/request", json={}).status_code == 200

    bogus = client.post(f"/sessions/{sid}/mode", json={"mode": "turbo"})
    assert bogus.status_code == 422
    assert bogus.json()["error"]["code"] == "invalid-value"


def test_mock_miss_maps_to_502(client):
    source = "package Garage\n\nclass Engine {\n}\n"
    sid = _create(client, modelSource=source)["sessionId"]
    res = client.post(f"/sessions/{sid}/suggestions/request", json={})
    assert res.status_code == 502
    error = res.json()["error"]
    assert error["code"] == "mock-miss"
    assert error["httpStatus"] == 502


def test_empty_model_maps_to_422(client):
    sid = _create(client, modelSource=None, packageName="Blank")["sessionId"]
    res = client.post(f"/sessions/{sid}/suggestions/request", json={})
    assert res.status_code == 422
    assert res.json()["error"]["code"] == "empty-model"


def test_log_endpoint_serves_csv(client):
    sid = _create(client)["sessionId"]
    client.post(f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Ward"})
    res = client.get(f"/sessions/{sid}/log")
    assert res.status_code == 200
    assert res.headers["content-type"].startswith("text/csv")
    lines = res.text.splitlines()
    assert lines[0] == HEADER
    assert "task-start" in lines[1]
    assert "create-class" in lines[2]


def test_static_dir_served_alongside_api(mock_gateway, catalog, tmp_path):
    (tmp_path / "index.html").write_text("<h1>ui</h1>", encoding="utf-8")
    app = create_app(
        mock_gateway,
        catalog=catalog,
        debounce_seconds=0.0,
        clock=FakeClock(),
        static_dir=tmp_path,
    )
    client = TestClient(app)
    page = client.get("/")
    assert page.status_code == 200
    assert "<h1>ui</h1>" in page.text
    # API routes keep precedence over the mount
    assert client.get("/healthz").json() == {"status": "ok"}
    assert _create(client)["revision"] == 0


def test_end_persists_artifacts_and_blocks_mutation(mock_gateway, catalog, tmp_path):
    app = create_app(
        mock_gateway,
        catalog=catalog,
        debounce_seconds=0.0,
        persist_dir=tmp_path,
        clock=FakeClock(),
    )
    client = TestClient(app)
    sid = _create(client)["sessionId"]
    client.post(f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Ward"})

    ended = client.post(f"/sessions/{sid}/end")
    assert ended.status_code == 200
    assert ended.json() == {"revision": 2, "ended": True}

    saved_model = parse_model((tmp_path / f"{sid}.dm").read_text("utf-8"))
    assert "Ward" in [c.name for c in saved_model.classes]
    saved_log = (tmp_path / f"{sid}.csv").read_text("utf-8")
    assert saved_log.splitlines()[0] == HEADER
    assert "task-end" in saved_log

    blocked = client.post(
        f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Annex"}
    )
    assert blocked.status_code == 409
    assert blocked.json()["error"]["code"] == "session-ended"

    snapshot = client.get(f"/sessions/{sid}/model")
    assert snapshot.status_code == 200
    assert snapshot.json()["ended"] is True


def test_automatic_mode_refreshes_in_background(catalog):
    def script(prompt: str, params) -> str:
        if prompt.startswith("Generate related concepts:"):
            return "[Gadget, Widget]"
        if prompt.startswith("Generate missing attributes"):
            return "Base: []"
        if prompt.startswith("Specify the nature"):
            return "no"
        raise AssertionError(f"unexpected prompt {prompt[:30]!r}")

    app = create_app(
        Gateway(FunctionProvider(script), sleep=lambda s: None),
        catalog=catalog,
        debounce_seconds=0.0,
    )
    client = TestClient(app)
    created = client.post(
        "/sessions", json={"packageName": "Lab", "mode": "Automatic", "seed": 0}
    ).json()
    sid = created["sessionId"]
    client.post(f"/sessions/{sid}/edits", json={"kind": "create-class", "name": "Base"})

    deadline = time.monotonic() + 5.0
    snapshot = None
    while time.monotonic() < deadline:
        res = client.get(f"/sessions/{sid}/model", params={"sinceRevision": 1})
        if res.status_code == 200:
            snapshot = res.json()
            break
        time.sleep(0.02)
    assert snapshot is not None, "background refresh never landed"
    assert snapshot["revision"] == 2

    suggested = client.get(f"/sessions/{sid}/suggestions").json()
    assert {c["payload"]["name"] for c in suggested["classes"]} == {"Gadget", "Widget"}
    client.post(f"/sessions/{sid}/end")

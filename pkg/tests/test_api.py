"""HTTP facade: endpoints, status mapping, idempotency, the event stream."""

import json
import warnings

import pytest

warnings.filterwarnings("ignore", category=DeprecationWarning)

from fastapi.testclient import TestClient  # noqa: E402

from casewright.api import create_app  # noqa: E402
from casewright.persistence import Store, canonical_snapshot, restore  # noqa: E402

TOKENS = {
    "tok-ana": {"worker": "ana", "roles": ["owner"]},
    "tok-pia": {"worker": "pia", "roles": ["specialist"]},
    "tok-sup": {"worker": "sup", "roles": ["supervisor"]},
    "tok-mia": {"worker": "mia", "roles": ["manager"]},
}

ANA = {"Authorization": "Bearer tok-ana"}
PIA = {"Authorization": "Bearer tok-pia"}
MIA = {"Authorization": "Bearer tok-mia"}


@pytest.fixture
def api(tmp_path, complaints_text):
    store = Store(tmp_path / "store")
    app = create_app(store, TOKENS)
    client = TestClient(app)
    from conftest import FIXTURES

    assert client.post("/models", json=json.loads(complaints_text), headers=ANA).status_code == 200
    assert client.post(
        "/models",
        json=json.loads((FIXTURES / "payment-reversal.json").read_text()),
        headers=ANA,
    ).status_code == 200
    assert client.post("/instances", json={"model": "complaints", "instanceId": "c1"},
                       headers=ANA).status_code == 200
    return client, store


def test_missing_or_bad_token(api):
    client, _ = api
    assert client.get("/instances/c1/summary").status_code == 403
    bad = {"Authorization": "Bearer nope"}
    assert client.get("/instances/c1/summary", headers=bad).status_code == 403


def test_unknown_instance_404(api):
    client, _ = api
    assert client.get("/instances/zz/summary", headers=ANA).status_code == 404
    r = client.post("/instances/zz/clock", json={"ticks": 1}, headers=ANA)
    assert r.status_code == 404


def test_unknown_view_404(api):
    client, _ = api
    assert client.get("/instances/c1/nope", headers=ANA).status_code == 404


def test_model_validation_diagnostics_400(api):
    client, _ = api
    bad = {"id": "bad", "plan": {"kind": "stage", "id": "root", "children": [
        {"kind": "human_task_blocking", "id": "t", "decorators": {"repetition": True}},
    ]}}
    r = client.post("/models", json=bad, headers=ANA)
    assert r.status_code == 400
    assert r.json()["diagnostics"][0]["rule"] == "RULE_REPETITION_NEEDS_ENTRY"


def test_unauthorized_action_403(api):
    client, _ = api
    r = client.post("/instances/c1/actions",
                    json={"target": "sendLetter", "action": "complete"}, headers=MIA)
    assert r.status_code == 403
    assert r.json()["error"] == "PermissionDenied"


def test_illegal_transition_409(api):
    client, _ = api
    r = client.post("/instances/c1/actions",
                    json={"target": "productComplaints", "action": "manualStart"}, headers=ANA)
    assert r.status_code == 409
    assert r.json()["error"] == "IllegalTransition"


def test_casefile_create_cascades_to_milestone(api):
    client, _ = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "productComplaint"},
                headers=ANA)
    r = client.post("/instances/c1/casefile", json={"op": "create", "path": "report"},
                    headers=PIA)
    assert r.status_code == 200
    names = [(e["source"], e["name"]) for e in r.json()["events"]]
    assert ("report", "create") in names
    assert ("completed#0", "occur") in names
    view = client.get("/instances/c1/milestones", headers=ANA).json()["data"]
    assert next(m for m in view if m["definitionId"] == "completed")["occurred"]


def test_milestones_view_matches_engine_query(api):
    """The API response is a pure encoding of the engine query result."""
    client, store = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "productComplaint"},
                headers=ANA)
    view = client.get("/instances/c1/milestones", headers=ANA).json()["data"]
    # independent check through a replayed engine instance
    from casewright.engine import Runtime

    replayed = restore(store, "c1")
    rt = Runtime(replay=True)
    rt.adopt(replayed)
    assert view == json.loads(json.dumps(rt.query(replayed, "milestones")))


def test_idempotency_key_appends_nothing_new(api):
    client, store = api
    before = store.last_seq("c1")
    headers = {**ANA, "Idempotency-Key": "once"}
    r1 = client.post("/instances/c1/clock", json={"ticks": 2}, headers=headers)
    after_first = store.last_seq("c1")
    r2 = client.post("/instances/c1/clock", json={"ticks": 2}, headers=headers)
    assert r1.json() == r2.json()
    assert store.last_seq("c1") == after_first > before
    summary = client.get("/instances/c1/summary", headers=ANA).json()["data"]
    assert summary["clock"] == 2


def test_plan_endpoint(api):
    client, _ = api
    plannable = client.get("/instances/c1/plannable", headers=ANA).json()["data"]
    assert {p["entry"] for p in plannable} == {"fraudStage", "audit"}
    r = client.post("/instances/c1/plan", json={"scope": "case", "entry": "fraudStage"},
                    headers=ANA)
    assert r.status_code == 200
    items = client.get("/instances/c1/items", headers=ANA).json()["data"]
    fraud = next(i for i in items if i["id"] == "fraudStage#0")
    assert fraud["state"] == "active" and fraud["discretionary"]
    # a repeat plan is a conflict
    r = client.post("/instances/c1/plan", json={"scope": "case", "entry": "fraudStage"},
                    headers=ANA)
    assert r.status_code == 409


def test_items_view_advertises_worker_actions(api):
    client, _ = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "productComplaint"},
                headers=ANA)
    items = client.get("/instances/c1/items", headers=PIA).json()["data"]
    specialist = next(i for i in items if i["id"] == "productSpecialist#0")
    assert "claim" in specialist["actions"]
    # the same view for the manager offers no claim (no execute_tasks)
    items = client.get("/instances/c1/items", headers=MIA).json()["data"]
    specialist = next(i for i in items if i["id"] == "productSpecialist#0")
    assert "claim" not in specialist["actions"]


def test_event_stream_carries_log_lines_verbatim(api):
    client, store = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "productComplaint"},
                headers=ANA)
    collected = []
    with client.stream("GET", "/instances/c1/events?after=0&wait=0.3", headers=ANA) as resp:
        assert resp.status_code == 200
        for line in resp.iter_lines():
            if line.startswith('data: {"seq"'):
                collected.append(line.removeprefix("data: "))
    from casewright.persistence import event_line

    stored = [event_line(doc) for doc in store.read_log("c1")]
    assert collected == stored


def test_event_stream_after_cursor(api):
    client, store = api
    client.post("/instances/c1/clock", json={"ticks": 1}, headers=ANA)
    last = store.last_seq("c1")
    with client.stream("GET", f"/instances/c1/events?after={last - 1}&wait=0.2",
                       headers=ANA) as resp:
        lines = [l for l in resp.iter_lines() if l.startswith('data: {"seq"')]
    assert len(lines) == 1 and f'"seq": {last}' in lines[0]


def test_restart_recovers_instances(api, tmp_path):
    client, store = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "productComplaint"},
                headers=ANA)
    live = client.get("/instances/c1/items", headers=ANA).json()["data"]
    # a new app over the same store must see the same state
    reopened = TestClient(create_app(Store(store.root), TOKENS))
    recovered = reopened.get("/instances/c1/items", headers=ANA).json()["data"]
    assert recovered == live


def test_mutations_persist_through_the_store(api):
    client, store = api
    client.post("/instances/c1/casefile", json={"op": "create", "path": "input"}, headers=ANA)
    client.post("/instances/c1/casefile", json={"op": "addChild", "path": "input/m1"},
                headers=ANA)
    restored = restore(store, "c1")
    assert restored.exists("input/m1")
    assert canonical_snapshot(restored)

"""Transition-table conformance: the tables are the product, so they are
tested exhaustively against the frozen event vocabulary."""

import itertools

import pytest

from casewright.errors import IllegalTransition
from casewright.lifecycle import (
    CASE_FILE_EVENTS,
    PLAN_ITEM_EVENTS,
    PREVIOUS,
    ElementKind as K,
    LifecycleState as S,
    allowed_events,
    apply_transition,
    conformance_json,
    events_for_kind,
    is_legal,
    transition_entries,
    worker_initiated,
)

# Frozen from the two standard-event tables: these exact names, nothing else.
CASE_EVENTS = {"create", "suspend", "reactivate", "complete", "terminate", "fault", "close"}
TASK_STAGE_EVENTS = {
    "create", "start", "enable", "manualStart", "disable", "reenable",
    "suspend", "resume", "parentSuspend", "parentResume", "fault",
    "reactivate", "exit", "complete", "terminate",
}
MILESTONE_LISTENER_EVENTS = {"create", "suspend", "resume", "occur", "terminate"}

ALL_STATES = list(S) + [None]


def test_event_vocabulary_is_frozen():
    assert PLAN_ITEM_EVENTS == CASE_EVENTS | TASK_STAGE_EVENTS | {"occur", "close"}
    assert len(PLAN_ITEM_EVENTS) == 17
    assert CASE_FILE_EVENTS == {
        "create", "replace", "update", "delete",
        "addReference", "removeReference", "addChild", "removeChild",
    }


@pytest.mark.parametrize("kind,expected", [
    (K.CASE, CASE_EVENTS),
    (K.TASK, TASK_STAGE_EVENTS),
    (K.STAGE, TASK_STAGE_EVENTS),
    (K.MILESTONE, MILESTONE_LISTENER_EVENTS),
    (K.LISTENER, MILESTONE_LISTENER_EVENTS),
    (K.CASE_FILE_ITEM, CASE_FILE_EVENTS),
])
def test_tables_cover_exactly_the_standard_events(kind, expected):
    assert events_for_kind(kind) == expected


def test_examples_from_the_event_tables():
    assert apply_transition(K.TASK, S.ENABLED, "manualStart") is S.ACTIVE
    assert apply_transition(K.MILESTONE, S.AVAILABLE, "occur") is S.OCCURRED
    assert apply_transition(K.CASE, None, "create") is S.ACTIVE
    assert apply_transition(K.STAGE, S.AVAILABLE, "parentSuspend") is S.SUSPENDED
    assert apply_transition(K.CASE_FILE_ITEM, S.AVAILABLE, "delete") is S.TERMINATED
    with pytest.raises(IllegalTransition):
        apply_transition(K.TASK, S.ACTIVE, "enable")


def test_resume_restores_the_recorded_pre_suspend_state():
    for prior in (S.AVAILABLE, S.ENABLED, S.DISABLED, S.ACTIVE):
        assert apply_transition(K.TASK, S.SUSPENDED, "resume", previous=prior) is prior
        assert apply_transition(K.STAGE, S.SUSPENDED, "parentResume", previous=prior) is prior
    # milestones/listeners can only be suspended from available
    assert apply_transition(K.MILESTONE, S.SUSPENDED, "resume") is S.AVAILABLE


def test_determinism_one_successor_per_triple():
    seen = set()
    for entry in transition_entries():
        key = (entry["kind"], entry["from"], entry["event"])
        assert key not in seen, f"duplicate entry for {key}"
        seen.add(key)


def test_exhaustive_scan_everything_not_listed_raises():
    """Oracle: the encoded table itself; every triple outside it must raise."""
    listed = {(e["kind"], e["from"], e["event"]) for e in transition_entries()}
    events = PLAN_ITEM_EVENTS | CASE_FILE_EVENTS
    for kind, state, event in itertools.product(K, ALL_STATES, sorted(events)):
        key = (kind.value, state.value if state else None, event)
        if key in listed:
            apply_transition(kind, state, event)  # must not raise
            assert is_legal(kind, state, event)
        else:
            assert not is_legal(kind, state, event)
            with pytest.raises(IllegalTransition):
                apply_transition(kind, state, event)


def test_terminality():
    """Nothing leaves closed/occurred/terminated except case reactivate/close."""
    for entry in transition_entries():
        if entry["from"] in ("closed", "occurred"):
            pytest.fail(f"transition out of {entry['from']}: {entry}")
        if entry["from"] == "terminated":
            assert entry["kind"] == "case" and entry["event"] in ("reactivate", "close")


def test_worker_column():
    assert allowed_events(K.CASE, S.ACTIVE, "worker") == {"suspend", "terminate"}
    assert "complete" in allowed_events(K.CASE, S.ACTIVE)  # engine may complete
    assert allowed_events(K.LISTENER, S.OCCURRED, "worker") == set()
    assert allowed_events(K.TASK, S.ENABLED, "worker") == {"manualStart", "disable", "terminate"}
    assert worker_initiated(K.MILESTONE, "terminate")
    assert not worker_initiated(K.MILESTONE, "occur")
    assert not worker_initiated(K.TASK, "parentSuspend")
    assert not worker_initiated(K.TASK, "start")
    # every data event is a worker action
    for event in CASE_FILE_EVENTS:
        assert worker_initiated(K.CASE_FILE_ITEM, event)


def test_case_reactivate_covers_all_four_source_states():
    for state in (S.SUSPENDED, S.COMPLETED, S.TERMINATED, S.FAILED):
        assert apply_transition(K.CASE, state, "reactivate") is S.ACTIVE
        assert apply_transition(K.CASE, state, "close") is S.CLOSED


def test_conformance_fixture_round_trips():
    import json

    entries = json.loads(conformance_json())
    assert len(entries) == len(transition_entries())
    sample = [e for e in entries if e["kind"] == "task" and e["event"] == "resume"]
    assert sample == [{"kind": "task", "from": "suspended", "event": "resume",
                       "to": PREVIOUS, "worker": True}]


def test_shipped_conformance_fixture_matches_code():
    from pathlib import Path

    shipped = (Path(__file__).resolve().parent.parent / "docs"
               / "lifecycle-conformance.json").read_text()
    assert shipped == conformance_json()

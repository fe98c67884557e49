"""Standard-event state machines for cases, stages, tasks, milestones,
event listeners, and case file items, encoded as pure transition tables.

The tables are data, not code: every legal (kind, state, event) triple maps to
exactly one successor, everything else raises ``IllegalTransition``.  The
``worker`` flag marks events a case worker may initiate directly; all other
events are produced by the engine.
"""

from __future__ import annotations

import json
from enum import Enum

from .errors import IllegalTransition


class ElementKind(str, Enum):
    CASE = "case"
    STAGE = "stage"
    TASK = "task"
    MILESTONE = "milestone"
    LISTENER = "listener"
    CASE_FILE_ITEM = "case_file_item"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


class LifecycleState(str, Enum):
    AVAILABLE = "available"
    ENABLED = "enabled"
    DISABLED = "disabled"
    ACTIVE = "active"
    SUSPENDED = "suspended"
    FAILED = "failed"
    COMPLETED = "completed"
    TERMINATED = "terminated"
    CLOSED = "closed"
    OCCURRED = "occurred"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


# Symbolic successor for resume / parentResume on tasks and stages: the
# engine records the state an item was in when it was suspended and restores
# it.  Milestones and listeners can only be suspended from `available`, so
# their resume entries stay concrete.
PREVIOUS = "previous"

# Event vocabulary.  Plan items and case file items have disjoint tables but
# overlap on the name `create`.
PLAN_ITEM_EVENTS = frozenset({
    "create", "start", "enable", "manualStart", "disable", "reenable",
    "suspend", "resume", "occur", "parentSuspend", "parentResume",
    "reactivate", "complete", "terminate", "exit", "fault", "close",
})
CASE_FILE_EVENTS = frozenset({
    "create", "replace", "update", "delete",
    "addReference", "removeReference", "addChild", "removeChild",
})

_A = LifecycleState.AVAILABLE
_EN = LifecycleState.ENABLED
_DI = LifecycleState.DISABLED
_AC = LifecycleState.ACTIVE
_SU = LifecycleState.SUSPENDED
_FA = LifecycleState.FAILED
_CO = LifecycleState.COMPLETED
_TE = LifecycleState.TERMINATED
_CL = LifecycleState.CLOSED
_OC = LifecycleState.OCCURRED

# (kind, from-state, event, to-state, worker-initiated)
# from-state None is the not-yet-created pseudo-state entered by `create`.
_ENTRIES: list[tuple[ElementKind, LifecycleState | None, str, LifecycleState | str, bool]] = []


def _row(kind: ElementKind, frm, event: str, to, worker: bool = False) -> None:
    states = frm if isinstance(frm, (list, tuple)) else [frm]
    for state in states:
        _ENTRIES.append((kind, state, event, to, worker))


# --- case ------------------------------------------------------------------
_row(ElementKind.CASE, None, "create", _AC)
_row(ElementKind.CASE, _AC, "suspend", _SU, worker=True)
_row(ElementKind.CASE, [_SU, _CO, _TE, _FA], "reactivate", _AC, worker=True)
_row(ElementKind.CASE, _AC, "complete", _CO)
_row(ElementKind.CASE, _AC, "terminate", _TE, worker=True)
_row(ElementKind.CASE, _AC, "fault", _FA)
_row(ElementKind.CASE, [_SU, _CO, _TE, _FA], "close", _CL, worker=True)

# --- tasks and stages (identical machines) ---------------------------------
for _kind in (ElementKind.TASK, ElementKind.STAGE):
    _row(_kind, None, "create", _A)
    _row(_kind, _A, "start", _AC)
    _row(_kind, _A, "enable", _EN, worker=True)
    _row(_kind, _EN, "manualStart", _AC, worker=True)
    _row(_kind, _EN, "disable", _DI, worker=True)
    _row(_kind, _DI, "reenable", _EN, worker=True)
    _row(_kind, _AC, "suspend", _SU, worker=True)
    _row(_kind, _SU, "resume", PREVIOUS, worker=True)
    _row(_kind, [_A, _EN, _DI, _AC, _FA], "parentSuspend", _SU)
    _row(_kind, _SU, "parentResume", PREVIOUS)
    _row(_kind, _AC, "fault", _FA)
    _row(_kind, _FA, "reactivate", _AC, worker=True)
    _row(_kind, [_A, _EN, _DI, _AC, _SU, _FA], "exit", _TE)
    _row(_kind, _AC, "complete", _CO)
    _row(_kind, [_A, _EN, _DI, _AC, _SU, _FA], "terminate", _TE, worker=True)

# --- milestones and event listeners (identical machines) -------------------
for _kind in (ElementKind.MILESTONE, ElementKind.LISTENER):
    _row(_kind, None, "create", _A)
    _row(_kind, _A, "suspend", _SU, worker=True)
    _row(_kind, _SU, "resume", _A, worker=True)
    _row(_kind, _A, "occur", _OC)
    _row(_kind, [_A, _SU], "terminate", _TE, worker=True)

# --- case file items --------------------------------------------------------
# Data items have no richer lifecycle than existing/deleted: `available`
# while present, `terminated` once deleted.  Every data event is a case
# worker action.  addChild/removeChild are additionally gated on the item
# being a container (engine-level check, not a state).
_row(ElementKind.CASE_FILE_ITEM, None, "create", _A, worker=True)
for _ev in ("replace", "update", "addReference", "removeReference",
            "addChild", "removeChild"):
    _row(ElementKind.CASE_FILE_ITEM, _A, _ev, _A, worker=True)
_row(ElementKind.CASE_FILE_ITEM, _A, "delete", _TE, worker=True)

_TABLE: dict[tuple[ElementKind, LifecycleState | None, str], LifecycleState | str] = {}
_WORKER: dict[tuple[ElementKind, LifecycleState | None, str], bool] = {}
for _k, _f, _e, _t, _w in _ENTRIES:
    _key = (_k, _f, _e)
    if _key in _TABLE:  # pragma: no cover - construction guard
        raise AssertionError(f"duplicate transition entry {_key}")
    _TABLE[_key] = _t
    _WORKER[_key] = _w


def apply_transition(
    kind: ElementKind,
    state: LifecycleState | None,
    event: str,
    previous: LifecycleState | None = None,
) -> LifecycleState:
    """Return the successor state for a legal (kind, state, event) triple.

    ``previous`` supplies the recorded pre-suspend state for resume /
    parentResume on tasks and stages; it defaults to ``active`` (the only
    state a direct worker suspend can come from).
    """
    to = _TABLE.get((kind, state, event))
    if to is None:
        raise IllegalTransition(kind, state.value if state else None, event)
    if to == PREVIOUS:
        return previous if previous is not None else LifecycleState.ACTIVE
    return to


def is_legal(kind: ElementKind, state: LifecycleState | None, event: str) -> bool:
    return (kind, state, event) in _TABLE


def allowed_events(
    kind: ElementKind,
    state: LifecycleState | None,
    actor: str = "engine",
) -> set[str]:
    """Events legal from this state; ``actor="worker"`` keeps only the
    worker-initiatable ones (the tables' case-worker column)."""
    events = set()
    for (k, f, e), w in _WORKER.items():
        if k is kind and f is state and (actor != "worker" or w):
            events.add(e)
    return events


def worker_initiated(kind: ElementKind, event: str) -> bool:
    return any(k is kind and e == event and w for (k, _f, e), w in _WORKER.items())


def events_for_kind(kind: ElementKind) -> set[str]:
    """Every event name appearing in this kind's table."""
    return {e for (k, _f, e) in _TABLE if k is kind}


def transition_entries() -> list[dict]:
    """The full table as a machine-readable conformance fixture."""
    return [
        {
            "kind": k.value,
            "from": f.value if f is not None else None,
            "event": e,
            "to": t if isinstance(t, str) and t == PREVIOUS else t.value,
            "worker": w,
        }
        for (k, f, e, t, w) in _ENTRIES
    ]


def conformance_json() -> str:
    return json.dumps(transition_entries(), indent=2) + "\n"


if __name__ == "__main__":  # pragma: no cover
    print(conformance_json(), end="")

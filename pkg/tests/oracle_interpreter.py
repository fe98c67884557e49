"""Brute-force reference interpreter for small case models.

Independent of the engine: plain dicts, an explicit event list, and the
executable rules written straight from their prose definitions.  Supports the
generated model family used by the small-model equivalence suite: blocking
human tasks, milestones, one level of stages, manual activation, repetition,
required, auto-complete, and entry criteria whose onParts reference case file
creates or item events.

Abstract state: (case state, sorted (definition, index, state) triples,
frozenset of case file paths).
"""

from __future__ import annotations

from dataclasses import dataclass, field

BLOCKING = {"active", "enabled", "suspended", "failed"}
TERMINAL = {"completed", "occurred", "terminated"}


@dataclass
class RefItem:
    definition: str
    kind: str  # "task" | "milestone" | "stage"
    parent: str  # "case" or a stage definition id (single instance stages only)
    index: int
    state: str
    observed: list = field(default_factory=list)  # one set per criterion


@dataclass
class RefCase:
    model: dict
    case_state: str = "active"
    paths: set = field(default_factory=set)
    items: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    events: list = field(default_factory=list)


def _defs_in(model: dict, parent: str) -> list[dict]:
    if parent == "case":
        return model["items"]
    owner = next(d for d in model["items"] if d["id"] == parent)
    return owner.get("children", [])


def _def_of(model: dict, def_id: str) -> dict:
    for d in model["items"]:
        if d["id"] == def_id:
            return d
        for c in d.get("children", []):
            if c["id"] == def_id:
                return c
    raise KeyError(def_id)


def create_case(model: dict) -> RefCase:
    case = RefCase(model=model)
    for d in model["items"]:
        _instantiate(case, d, "case")
    _settle(case)
    return case


def _instantiate(case: RefCase, d: dict, parent: str) -> RefItem:
    index = case.counters.get(d["id"], 0)
    case.counters[d["id"]] = index + 1
    item = RefItem(definition=d["id"], kind=d["kind"], parent=parent, index=index,
                   state="available", observed=[set() for _ in d.get("entry", [])])
    case.items.append(item)
    case.events.append((d["id"], "create"))
    if not d.get("entry"):
        _initial_move(case, item, d)
    return item


def _initial_move(case: RefCase, item: RefItem, d: dict) -> None:
    if d["kind"] == "milestone":
        return  # armed, occurs only through a criterion
    if d.get("manual"):
        item.state = "enabled"
        case.events.append((d["id"], "enable"))
        return
    _start(case, item, d, "start")


def _start(case: RefCase, item: RefItem, d: dict, event: str) -> None:
    item.state = "active"
    case.events.append((d["id"], event))
    if d["kind"] == "stage":
        for child in d.get("children", []):
            _instantiate(case, child, d["id"])


def _parent_active(case: RefCase, item: RefItem) -> bool:
    if case.case_state != "active":
        return False
    if item.parent == "case":
        return True
    return any(i.definition == item.parent and i.state == "active" for i in case.items)


def _on_part_hit(part: dict, event: tuple) -> bool:
    return (part["source"], part["event"]) == event


def _settle(case: RefCase) -> None:
    """Process the pending event list to quiescence, then auto-completions."""
    while True:
        while case.events:
            event = case.events.pop(0)
            # observation phase: every live instance accumulates
            fired: list[tuple[RefItem, int]] = []
            for item in case.items:
                d = _def_of(case.model, item.definition)
                for ci, criterion in enumerate(d.get("entry", [])):
                    before = len(item.observed[ci])
                    for pi, part in enumerate(criterion):
                        if _on_part_hit(part, event):
                            item.observed[ci].add(pi)
                    if (len(item.observed[ci]) == len(criterion)
                            and len(item.observed[ci]) > before):
                        fired.append((item, ci))
            # firing phase
            for item, ci in fired:
                if item.state != "available" or not _parent_active(case, item):
                    continue
                item.observed[ci] = set()
                d = _def_of(case.model, item.definition)
                if d["kind"] == "milestone":
                    item.state = "occurred"
                    case.events.append((d["id"], "occur"))
                elif d.get("manual"):
                    item.state = "enabled"
                    case.events.append((d["id"], "enable"))
                else:
                    _start(case, item, d, "start")
                if d.get("repetition"):
                    _instantiate(case, d, item.parent)
        if not _auto_complete_round(case):
            break


def _completable(case: RefCase, scope: str) -> bool:
    children = [i for i in case.items if i.parent == scope]
    for child in children:
        if child.state in BLOCKING:
            return False
    for d in _defs_in(case.model, scope):
        if d.get("required"):
            if not any(i.definition == d["id"] and i.state in ("completed", "occurred")
                       for i in children):
                return False
    return True


def _complete_scope(case: RefCase, scope: str) -> None:
    # never-started leftovers are cleaned up when their scope completes
    for child in [i for i in case.items if i.parent == scope]:
        if child.state not in TERMINAL:
            child.state = "terminated"
            case.events.append((child.definition, "terminate"))


def _auto_complete_round(case: RefCase) -> bool:
    # innermost stages first (the family nests exactly one level)
    for item in case.items:
        d = _def_of(case.model, item.definition)
        if (d["kind"] == "stage" and d.get("auto_complete")
                and item.state == "active" and _completable(case, d["id"])):
            item.state = "completed"
            case.events.append((d["id"], "complete"))
            _complete_scope(case, d["id"])
            return True
    if (case.model.get("auto_complete") and case.case_state == "active"
            and _completable(case, "case")):
        case.case_state = "completed"
        _complete_scope(case, "case")
        return True
    return False


def _latest(case: RefCase, def_id: str) -> RefItem | None:
    matching = [i for i in case.items if i.definition == def_id]
    return max(matching, key=lambda i: i.index) if matching else None


def apply_stimulus(case: RefCase, stimulus: tuple) -> None:
    """Stimuli that do not apply in the current state are no-ops, mirroring
    an engine caller that ignores rejected requests."""
    if case.case_state != "active":
        return
    kind = stimulus[0]
    if kind == "create":
        path = stimulus[1]
        if path in case.paths:
            return
        case.paths.add(path)
        case.events.append((path, "create"))
    elif kind == "finish":
        def_id = stimulus[1]
        target = _latest(case, def_id)
        if target is None or target.state != "active":
            return
        d = _def_of(case.model, def_id)
        if d["kind"] != "task":
            return
        target.state = "completed"
        case.events.append((def_id, "complete"))
    elif kind == "manualStart":
        def_id = stimulus[1]
        target = _latest(case, def_id)
        if target is None or target.state != "enabled":
            return
        if not _parent_active(case, target):
            return
        d = _def_of(case.model, def_id)
        _start(case, target, d, "manualStart")
    else:  # pragma: no cover - generator bug guard
        raise ValueError(f"unknown stimulus {stimulus!r}")
    _settle(case)


def abstract_state(case: RefCase) -> tuple:
    items = tuple(sorted((i.definition, i.index, i.state) for i in case.items))
    return (case.case_state, items, frozenset(case.paths))

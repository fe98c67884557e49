"""The case runtime: owns instances, dispatches standard events, evaluates
sentries, applies decorators, executes planning, and mutates the case file.

Execution model: one logical owner per instance.  Every mutating operation
appends events to the instance's queue and processes it to quiescence
(bounded by a cascade limit, so cyclic criterion chains fail loudly instead
of spinning).  State changes are applied synchronously when an event is
emitted; reactions (sentry observation and firing, auto-completion, timers)
run in strict emission order, which makes every run deterministic and
replayable from the event log alone.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from . import expressions, lifecycle
from .errors import (
    AlreadyPlanned,
    CascadeLimitExceeded,
    CasewrightError,
    EvaluationError,
    IllegalTransition,
    InvalidModel,
    NoSuchPath,
    NotAContainer,
    NotClaimed,
    NotInScope,
    PermissionDenied,
    RequiredIncomplete,
    ScopeNotActive,
    UnknownTarget,
)
from .lifecycle import ElementKind, LifecycleState as S
from .model import (
    CaseModel,
    HUMAN_TASK_KINDS,
    ItemKind,
    ModelIndex,
    PlanItemDef,
    Sentry,
    has_errors,
    lifecycle_kind,
    validate_model,
)

logger = logging.getLogger(__name__)

CASE_TARGET = "case"
ENGINE_ACTOR = "engine"
CLOCK_ACTOR = "clock"
SUBCASE_PREFIX = "subcase:"

# Log entry names that are engine-local markers rather than standard events:
# claim (human-task claim sub-state), plan (a planning action), advance
# (logical clock movement).  They are stimuli, so replay re-invokes them.
CLAIM_MARKER = "claim"
PLAN_MARKER = "plan"
ADVANCE_MARKER = "advance"

_NONTERMINAL = frozenset({S.AVAILABLE, S.ENABLED, S.DISABLED, S.ACTIVE, S.SUSPENDED, S.FAILED})
_BLOCKS_COMPLETION = frozenset({S.ACTIVE, S.ENABLED, S.SUSPENDED, S.FAILED})
_SATISFIES_REQUIRED = frozenset({S.COMPLETED, S.OCCURRED})

_PERMISSION_FOR = {
    "enable": "manual_activate",
    "manualStart": "manual_activate",
    "disable": "manual_activate",
    "reenable": "manual_activate",
    "suspend": "suspend_resume",
    "resume": "suspend_resume",
    "reactivate": "reactivate",
    "terminate": "close_case",
    "close": "close_case",
}


@dataclass
class StandardEvent:
    seq: int
    source: str  # item instance id | case file path | "case" | "clock"
    name: str
    actor: str  # worker id | "engine" | "clock" | "subcase:<id>"
    tick: int
    payload: object = None

    def to_dict(self) -> dict:
        doc = {"seq": self.seq, "source": self.source, "name": self.name,
               "actor": self.actor, "tick": self.tick}
        if self.payload is not None:
            doc["payload"] = self.payload
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "StandardEvent":
        return cls(seq=doc["seq"], source=doc["source"], name=doc["name"],
                   actor=doc["actor"], tick=doc["tick"], payload=doc.get("payload"))


@dataclass
class _Satisfied:
    """Internal criterion-satisfied note; queued but never logged."""

    source: str  # the criterion id
    name: str = "satisfied"


@dataclass
class ItemInstance:
    id: str
    definition_id: str
    parent: str  # "case" or a stage instance id
    state: S
    index: int = 0
    discretionary: bool = False
    pre_suspend_state: S | None = None
    suspended_by: str | None = None  # scope that parent-suspended this item
    claimed_by: str | None = None
    has_started: bool = False
    timer_deadline: int | None = None


@dataclass
class SentryRuntime:
    owner: str  # item instance id or "case"
    sentry: Sentry
    role: str  # "entry" | "exit" | "case_exit"
    observed: set[int] = field(default_factory=set)
    pending: bool = False  # satisfied while the owner was not eligible


@dataclass
class CaseFileEntry:
    path: str
    exists: bool = True
    container: bool = False
    declared: bool = True
    deleted: bool = False
    children: set[str] = field(default_factory=set)  # full child paths
    references: set[str] = field(default_factory=set)
    revision: int = 0
    value: object = None

    @property
    def state(self) -> S:
        return S.TERMINATED if self.deleted else S.AVAILABLE


@dataclass
class CompletionDecision:
    scope: str
    auto_complete: bool
    completable: bool
    blockers: list[str]


class CaseInstance:
    """Live runtime state of one case; owns exactly one case file."""

    def __init__(self, instance_id: str, model: CaseModel):
        self.instance_id = instance_id
        self.model = model
        self.index = ModelIndex(model)
        self.case_state: S = S.ACTIVE
        self.event_seq = 0
        self.logical_clock = 0
        self.items: dict[str, ItemInstance] = {}
        self.sentries: dict[tuple[str, str], SentryRuntime] = {}
        self.case_file: dict[str, CaseFileEntry] = {}
        self.sub_cases: dict[str, str] = {}  # case-task instance -> child instance id
        self.sub_case_retries: dict[str, int] = {}
        self.work_items: dict[str, dict] = {}  # process-task instance -> record
        self.history: list[StandardEvent] = []
        self._queue: deque = deque()
        self._def_counts: dict[str, int] = {}

    # -- case file expression context ---------------------------------------

    def exists(self, path: str) -> bool:
        entry = self.case_file.get(path)
        return entry is not None and entry.exists

    def count(self, path: str) -> int:
        entry = self.case_file.get(path)
        if entry is None or not entry.exists:
            raise EvaluationError(f"missing case file item: {path}")
        if not entry.container:
            raise EvaluationError(f"count() on non-container: {path}")
        return len(entry.children)

    def value(self, path: str) -> object:
        entry = self.case_file.get(path)
        if entry is None or not entry.exists:
            raise EvaluationError(f"missing case file item: {path}")
        return entry.value

    # -- snapshots ------------------------------------------------------------

    def to_snapshot(self) -> dict:
        """Full state as a canonical JSON-able document (queue must be empty)."""
        assert not self._queue, "snapshot requires quiescence"
        return {
            "instanceId": self.instance_id,
            "modelId": self.model.id,
            "caseState": self.case_state.value,
            "eventSeq": self.event_seq,
            "clock": self.logical_clock,
            "items": [
                {
                    "id": item.id,
                    "definition": item.definition_id,
                    "parent": item.parent,
                    "state": item.state.value,
                    "index": item.index,
                    "discretionary": item.discretionary,
                    "preSuspend": item.pre_suspend_state.value if item.pre_suspend_state else None,
                    "suspendedBy": item.suspended_by,
                    "claimedBy": item.claimed_by,
                    "started": item.has_started,
                    "timerDeadline": item.timer_deadline,
                }
                for item in self.items.values()
            ],
            "sentries": [
                {
                    "owner": s.owner,
                    "sentry": s.sentry.id,
                    "role": s.role,
                    "observed": sorted(s.observed),
                    "pending": s.pending,
                    "armed": self._armed(s),
                }
                for s in self.sentries.values()
            ],
            "caseFile": [
                {
                    "path": e.path,
                    "exists": e.exists,
                    "container": e.container,
                    "declared": e.declared,
                    "deleted": e.deleted,
                    "children": sorted(e.children),
                    "references": sorted(e.references),
                    "revision": e.revision,
                    "value": e.value,
                }
                for e in sorted(self.case_file.values(), key=lambda e: e.path)
            ],
            "subCases": dict(sorted(self.sub_cases.items())),
            "subCaseRetries": dict(sorted(self.sub_case_retries.items())),
            "workItems": dict(sorted(self.work_items.items())),
        }

    def _armed(self, s: SentryRuntime) -> bool:
        if s.role == "case_exit":
            return self.case_state is S.ACTIVE
        owner = self.items.get(s.owner)
        if owner is None:
            return False
        if s.role == "entry":
            return owner.state is S.AVAILABLE
        return owner.state in _NONTERMINAL

    @classmethod
    def from_snapshot(cls, model: CaseModel, doc: dict) -> "CaseInstance":
        inst = cls(doc["instanceId"], model)
        inst.case_state = S(doc["caseState"])
        inst.event_seq = doc["eventSeq"]
        inst.logical_clock = doc["clock"]
        for it in doc["items"]:
            item = ItemInstance(
                id=it["id"],
                definition_id=it["definition"],
                parent=it["parent"],
                state=S(it["state"]),
                index=it["index"],
                discretionary=it["discretionary"],
                pre_suspend_state=S(it["preSuspend"]) if it["preSuspend"] else None,
                suspended_by=it["suspendedBy"],
                claimed_by=it["claimedBy"],
                has_started=it["started"],
                timer_deadline=it["timerDeadline"],
            )
            inst.items[item.id] = item
            count = inst._def_counts.get(item.definition_id, 0)
            inst._def_counts[item.definition_id] = max(count, item.index + 1)
        for sd in doc["sentries"]:
            sentry = inst.index.sentries[sd["sentry"]]
            inst.sentries[(sd["owner"], sentry.id)] = SentryRuntime(
                owner=sd["owner"], sentry=sentry, role=sd["role"],
                observed=set(sd["observed"]), pending=sd["pending"],
            )
        for ed in doc["caseFile"]:
            inst.case_file[ed["path"]] = CaseFileEntry(
                path=ed["path"], exists=ed["exists"], container=ed["container"],
                declared=ed["declared"], deleted=ed["deleted"],
                children=set(ed["children"]), references=set(ed["references"]),
                revision=ed["revision"], value=ed["value"],
            )
        inst.sub_cases = dict(doc["subCases"])
        inst.sub_case_retries = {k: int(v) for k, v in doc["subCaseRetries"].items()}
        inst.work_items = {k: dict(v) for k, v in doc["workItems"].items()}
        return inst


class Runtime:
    """Engine session: a model registry plus the instances it is running.

    All mutating operations on one instance are serialized by the caller (the
    service holds one lock per instance); distinct instances are independent.
    In replay mode permission checks are skipped (the log was checked when it
    was written) and sub-case instances are not spawned, only recorded.
    """

    def __init__(self, model_resolver=None, on_event=None, on_instance_created=None,
                 replay: bool = False, cascade_limit: int = 10_000):
        self.models: dict[str, CaseModel] = {}
        self.instances: dict[str, CaseInstance] = {}
        self.workers: dict[str, set[str]] = {}
        self.replay = replay
        self.cascade_limit = cascade_limit
        self._model_resolver = model_resolver
        self._on_event = on_event
        self._on_instance_created = on_instance_created
        self._subcase_parent: dict[str, tuple[str, str]] = {}  # child id -> (parent id, task iid)
        self._pending_notes: deque = deque()
        self._op_depth = 0
        self._expr_cache: dict[str, expressions.Expression] = {}
        self._instance_counter = 0

    # ------------------------------------------------------------------ setup

    def register_model(self, model: CaseModel) -> None:
        self.models[model.id] = model

    def register_worker(self, worker_id: str, roles: set[str] | list[str]) -> None:
        self.workers[worker_id] = set(roles)

    def resolve_model(self, model_id: str) -> CaseModel | None:
        if model_id in self.models:
            return self.models[model_id]
        if self._model_resolver is not None:
            return self._model_resolver(model_id)
        return None

    def adopt(self, instance: CaseInstance) -> None:
        """Register an externally restored instance (rebuilds sub-case links)."""
        self.instances[instance.instance_id] = instance
        for task_iid, child_id in instance.sub_cases.items():
            self._subcase_parent[child_id] = (instance.instance_id, task_iid)

    def get_instance(self, instance_id: str) -> CaseInstance:
        inst = self.instances.get(instance_id)
        if inst is None:
            raise UnknownTarget(f"unknown instance {instance_id!r}")
        return inst

    # ------------------------------------------------------------- public ops

    def create_instance(self, model: CaseModel | str, instance_id: str | None = None) -> CaseInstance:
        """Instantiate a case: every non-discretionary item is created, items
        without entry criteria start (or become enabled under manual
        activation), and the event queue is drained to quiescence."""
        if isinstance(model, str):
            resolved = self.resolve_model(model)
            if resolved is None:
                raise UnknownTarget(f"unknown model {model!r}")
            model = resolved
        diagnostics = validate_model(model)
        if has_errors(diagnostics):
            raise InvalidModel(
                "; ".join(f"{d.element_id}: {d.rule}" for d in diagnostics if d.severity == "error")
            )
        self.models.setdefault(model.id, model)
        if instance_id is None:
            self._instance_counter += 1
            instance_id = f"{model.id}-{self._instance_counter}"
        if instance_id in self.instances:
            raise ValueError(f"instance id {instance_id!r} already exists")
        inst = CaseInstance(instance_id, model)
        self.instances[instance_id] = inst
        if self._on_instance_created is not None and not self.replay:
            self._on_instance_created(inst)
        self._op_depth += 1
        try:
            self._emit(inst, CASE_TARGET, "create", ENGINE_ACTOR)
            for sentry in model.case_exit_criteria:
                inst.sentries[(CASE_TARGET, sentry.id)] = SentryRuntime(CASE_TARGET, sentry, "case_exit")
            for child in model.plan.children:
                self._instantiate(inst, child, parent=CASE_TARGET)
            self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst

    def dispatch(self, inst: CaseInstance, source: str, name: str,
                 actor: str = ENGINE_ACTOR, payload: object = None) -> list[StandardEvent]:
        """Apply one raw standard event (it must be legal for its source) and
        run the cascade to quiescence.  Higher-level operations are built on
        this; it is also the hook for injecting events such as `fault`."""
        mark = len(inst.history)
        self._op_depth += 1
        try:
            if source == CASE_TARGET:
                self._case_transition(inst, name, actor)
            elif source in inst.items:
                self._transition(inst, inst.items[source], name, actor, payload=payload)
            else:
                self._case_file_apply(inst, actor, name, source, payload)
            self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst.history[mark:]

    def worker_action(self, inst: CaseInstance, actor: str, target: str,
                      action: str, payload: object = None) -> list[StandardEvent]:
        """A case worker (or sub-case notification) acts on an item or the case."""
        mark = len(inst.history)
        self._op_depth += 1
        try:
            if inst.case_state is S.CLOSED:
                raise IllegalTransition(ElementKind.CASE, S.CLOSED.value, action)
            if target == CASE_TARGET:
                self._case_action(inst, actor, action)
            else:
                if inst.case_state is not S.ACTIVE:
                    raise IllegalTransition(ElementKind.CASE, inst.case_state.value, action)
                item = self._resolve_target(inst, target)
                self._item_action(inst, actor, item, action, payload)
            self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst.history[mark:]

    def case_file_op(self, inst: CaseInstance, actor: str, op: str, path: str,
                     payload: object = None) -> list[StandardEvent]:
        """Mutate the case file and dispatch the corresponding data event."""
        mark = len(inst.history)
        self._op_depth += 1
        try:
            if inst.case_state not in (S.ACTIVE, S.SUSPENDED):
                raise IllegalTransition(ElementKind.CASE, inst.case_state.value, op)
            self._check_permission(inst, actor, "modify_case_file")
            self._case_file_apply(inst, actor, op, path, payload)
            self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst.history[mark:]

    def plan(self, inst: CaseInstance, actor: str, scope: str, entry: str) -> list[StandardEvent]:
        """Add a discretionary item or a whole plan fragment to the plan."""
        mark = len(inst.history)
        self._op_depth += 1
        try:
            table, parent, scope_active = self._planning_scope(inst, scope)
            if table is None:
                raise NotInScope(f"{scope!r} has no planning table")
            if not scope_active:
                raise ScopeNotActive(f"planning scope {scope!r} is not active")
            entry_def = next((e for e in table.entries if e.id == entry), None)
            if entry_def is None:
                raise NotInScope(f"{entry!r} is not in the planning table of {scope!r}")
            self._check_plan_permission(inst, actor, table)
            members = entry_def.children if entry_def.kind is ItemKind.FRAGMENT else (entry_def,)
            for member in members:
                if not member.decorators.repetition and any(
                    i.definition_id == member.id and i.parent == parent
                    for i in inst.items.values()
                ):
                    raise AlreadyPlanned(f"{member.id!r} is already planned in this scope")
            self._emit(inst, scope, PLAN_MARKER, actor, payload={"entry": entry})
            for member in members:
                self._instantiate(inst, member, parent=parent)
            self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst.history[mark:]

    def advance_clock(self, inst: CaseInstance, ticks: int) -> list[StandardEvent]:
        """Advance logical time tick by tick, firing due timer listeners."""
        if not isinstance(ticks, int) or ticks <= 0:
            raise ValueError("ticks must be a positive integer")
        mark = len(inst.history)
        self._op_depth += 1
        try:
            self._emit(inst, "clock", ADVANCE_MARKER, CLOCK_ACTOR, payload={"ticks": ticks})
            for _ in range(ticks):
                inst.logical_clock += 1
                self._check_timers(inst)
                self._drain(inst)
        finally:
            self._op_depth -= 1
        self._flush_notes()
        return inst.history[mark:]

    def check_completion(self, inst: CaseInstance, scope: str) -> CompletionDecision:
        """Completion decision for a stage instance or the case itself."""
        if scope == CASE_TARGET:
            auto = inst.model.auto_complete
        else:
            item = self._resolve_target(inst, scope)
            scope = item.id
            auto = inst.index.items[item.definition_id].decorators.auto_complete
        blockers = self._completion_blockers(inst, scope)
        return CompletionDecision(scope=scope, auto_complete=auto,
                                  completable=not blockers, blockers=blockers)

    # ------------------------------------------------------------------ query

    def query(self, inst: CaseInstance, view: str, actor: str | None = None) -> object:
        if view == "summary":
            decision = self.check_completion(inst, CASE_TARGET)
            doc = {
                "instanceId": inst.instance_id,
                "modelId": inst.model.id,
                "name": inst.model.name,
                "caseState": inst.case_state.value,
                "clock": inst.logical_clock,
                "eventSeq": inst.event_seq,
                "autoComplete": inst.model.auto_complete,
                "completable": decision.completable,
            }
            if actor is not None:
                doc["caseActions"] = self.allowed_worker_actions(inst, actor, CASE_TARGET)
            return doc
        if view == "items":
            out = []
            for item in inst.items.values():
                d = inst.index.items[item.definition_id]
                doc = {
                    "id": item.id,
                    "definitionId": item.definition_id,
                    "name": d.name,
                    "kind": d.kind.value,
                    "state": item.state.value,
                    "index": item.index,
                    "parent": item.parent,
                    "discretionary": item.discretionary,
                    "claimedBy": item.claimed_by,
                    "required": d.decorators.required,
                    "manualActivation": d.decorators.manual_activation,
                    "repetition": d.decorators.repetition,
                }
                if actor is not None:
                    doc["actions"] = self.allowed_worker_actions(inst, actor, item.id)
                out.append(doc)
            return out
        if view == "milestones":
            out = []
            for def_id, d in inst.index.items.items():
                if d.kind is not ItemKind.MILESTONE:
                    continue
                instances = [i for i in inst.items.values() if i.definition_id == def_id]
                out.append({
                    "definitionId": def_id,
                    "name": d.name,
                    "instances": [{"id": i.id, "state": i.state.value} for i in instances],
                    "occurred": any(i.state is S.OCCURRED for i in instances),
                    "occurrences": sum(1 for i in instances if i.state is S.OCCURRED),
                })
            return out
        if view == "case_file":
            paths = set(inst.case_file) | set(inst.index.paths)
            out = []
            for path in sorted(paths):
                entry = inst.case_file.get(path)
                declared = inst.index.paths.get(path)
                out.append({
                    "path": path,
                    "exists": entry.exists if entry else False,
                    "container": entry.container if entry else bool(declared and declared.container),
                    "declared": declared is not None,
                    "children": sorted(entry.children) if entry else [],
                    "references": sorted(entry.references) if entry else [],
                    "revision": entry.revision if entry else 0,
                    "value": entry.value if entry else None,
                })
            return out
        if view == "plannable":
            return self._plannable(inst, actor)
        if view == "history":
            return [ev.to_dict() for ev in inst.history]
        raise UnknownTarget(f"unknown view {view!r}")

    def allowed_worker_actions(self, inst: CaseInstance, actor: str, target: str) -> list[str]:
        """Actions that worker_action would currently accept for this actor.

        The console renders exactly this list, so every offered button
        corresponds to a call that will not be rejected."""
        perms = self._actor_permissions(inst, actor)
        if target == CASE_TARGET:
            out = set()
            for event in lifecycle.allowed_events(ElementKind.CASE, inst.case_state, "worker"):
                if perms is None or _PERMISSION_FOR.get(event, "close_case") in perms:
                    out.add(event)
            if (inst.case_state is S.ACTIVE
                    and not inst.model.auto_complete
                    and (perms is None or "close_case" in perms)
                    and not self._completion_blockers(inst, CASE_TARGET)):
                out.add("complete")
            return sorted(out)
        if inst.case_state is not S.ACTIVE:
            return []
        try:
            item = self._resolve_target(inst, target)
        except UnknownTarget:
            return []
        d = inst.index.items[item.definition_id]
        kind = lifecycle_kind(d.kind)
        out = set()
        for event in lifecycle.allowed_events(kind, item.state, "worker"):
            if event in ("resume", "reactivate", "manualStart") and not self._parents_active(inst, item):
                continue
            if event == "resume" and item.suspended_by is not None:
                continue  # parent-suspended items resume with their parent
            if perms is not None and _PERMISSION_FOR.get(event, "close_case") not in perms:
                continue
            out.add(event)
        executes = perms is None or "execute_tasks" in perms
        if item.state is S.ACTIVE and executes:
            if d.kind in HUMAN_TASK_KINDS and item.claimed_by is None:
                out.add("claim")
            if d.kind is ItemKind.HUMAN_TASK_BLOCKING and item.claimed_by == actor:
                out.add("complete")
            if d.kind in (ItemKind.PROCESS_TASK, ItemKind.CASE_TASK):
                out.add("complete")
        if (d.kind is ItemKind.USER_LISTENER and item.state is S.AVAILABLE
                and self._parents_active(inst, item) and executes):
            out.add("occur")
        if (d.kind is ItemKind.STAGE and item.state is S.ACTIVE
                and (perms is None or "close_case" in perms)
                and not self._completion_blockers(inst, item.id)):
            out.add("complete")
        return sorted(out)

    # ------------------------------------------------------- permission logic

    def _actor_permissions(self, inst: CaseInstance, actor: str) -> set[str] | None:
        """None means unrestricted (engine-internal actors or replay mode)."""
        if self.replay or actor in (ENGINE_ACTOR, CLOCK_ACTOR) or actor.startswith(SUBCASE_PREFIX):
            return None
        roles = self.workers.get(actor, set())
        model_roles = {r.name: r.permissions for r in inst.model.roles}
        perms: set[str] = set()
        for role in roles:
            perms |= set(model_roles.get(role, ()))
        return perms

    def _check_permission(self, inst: CaseInstance, actor: str, permission: str) -> None:
        perms = self._actor_permissions(inst, actor)
        if perms is None:
            return
        if permission not in perms:
            raise PermissionDenied(f"{actor!r} lacks the {permission!r} permission")

    def _check_plan_permission(self, inst: CaseInstance, actor: str, table) -> None:
        perms = self._actor_permissions(inst, actor)
        if perms is None:
            return
        if "plan" not in perms:
            raise PermissionDenied(f"{actor!r} lacks the 'plan' permission")
        if table.authorized_roles and not (self.workers.get(actor, set()) & table.authorized_roles):
            raise PermissionDenied(f"{actor!r} is not authorized by this planning table")

    # --------------------------------------------------------- event emission

    def _emit(self, inst: CaseInstance, source: str, name: str, actor: str,
              payload: object = None) -> StandardEvent:
        inst.event_seq += 1
        event = StandardEvent(seq=inst.event_seq, source=source, name=name,
                              actor=actor, tick=inst.logical_clock, payload=payload)
        inst.history.append(event)
        logger.debug("%s: #%d %s %s (%s)", inst.instance_id, event.seq, source, name, actor)
        if self._on_event is not None:
            self._on_event(inst, event)
        inst._queue.append(event)
        return event

    # ----------------------------------------------------- transitions (items)

    def _transition(self, inst: CaseInstance, item: ItemInstance, event: str,
                    actor: str, payload: object = None, suspended_by: str | None = None) -> None:
        d = inst.index.items[item.definition_id]
        kind = lifecycle_kind(d.kind)
        previous = item.pre_suspend_state
        new_state = lifecycle.apply_transition(kind, item.state, event, previous=previous)
        if event in ("suspend", "parentSuspend"):
            item.pre_suspend_state = item.state
            item.suspended_by = suspended_by
        elif event in ("resume", "parentResume"):
            item.pre_suspend_state = None
            item.suspended_by = None
        item.state = new_state
        if new_state is S.ACTIVE:
            item.has_started = True
        self._emit(inst, item.id, event, actor, payload=payload)
        self._structural_effects(inst, item, d, event, payload)

    def _structural_effects(self, inst: CaseInstance, item: ItemInstance,
                            d: PlanItemDef, event: str, payload: object) -> None:
        if d.kind is ItemKind.STAGE:
            if event in ("start", "manualStart"):
                for child in d.children:
                    self._instantiate(inst, child, parent=item.id)
            elif event in ("suspend", "parentSuspend"):
                self._suspend_children(inst, item.id)
            elif event in ("resume", "parentResume"):
                self._resume_children(inst, item.id)
            elif event in ("terminate", "exit", "complete"):
                self._terminate_children(inst, item.id)
        elif d.kind is ItemKind.CASE_TASK:
            if event in ("start", "manualStart", "reactivate"):
                self._spawn_sub_case(inst, item, d)
        elif d.kind is ItemKind.PROCESS_TASK:
            if event in ("start", "manualStart"):
                inst.work_items[item.id] = {"processKey": d.process_key, "status": "open", "result": None}
            elif event == "complete":
                record = inst.work_items.get(item.id)
                if record is not None:
                    record["status"] = "done"
                    record["result"] = payload
            elif event in ("terminate", "exit"):
                record = inst.work_items.get(item.id)
                if record is not None and record["status"] == "open":
                    record["status"] = "cancelled"

    def _suspend_children(self, inst: CaseInstance, scope_id: str) -> None:
        # Milestones and listeners have no parentSuspend event; they get a
        # plain engine-initiated suspend when their parent suspends.
        for child in [i for i in inst.items.values() if i.parent == scope_id]:
            if child.state not in _NONTERMINAL or child.state is S.SUSPENDED:
                continue
            d = inst.index.items[child.definition_id]
            if lifecycle_kind(d.kind) in (ElementKind.TASK, ElementKind.STAGE):
                self._transition(inst, child, "parentSuspend", ENGINE_ACTOR, suspended_by=scope_id)
            else:
                self._transition(inst, child, "suspend", ENGINE_ACTOR, suspended_by=scope_id)

    def _resume_children(self, inst: CaseInstance, scope_id: str) -> None:
        for child in [i for i in inst.items.values() if i.parent == scope_id]:
            if child.state is not S.SUSPENDED or child.suspended_by != scope_id:
                continue
            d = inst.index.items[child.definition_id]
            if lifecycle_kind(d.kind) in (ElementKind.TASK, ElementKind.STAGE):
                self._transition(inst, child, "parentResume", ENGINE_ACTOR)
            else:
                self._transition(inst, child, "resume", ENGINE_ACTOR)

    def _terminate_children(self, inst: CaseInstance, scope_id: str) -> None:
        for child in [i for i in inst.items.values() if i.parent == scope_id]:
            if child.state in _NONTERMINAL:
                self._transition(inst, child, "terminate", ENGINE_ACTOR)

    def _spawn_sub_case(self, inst: CaseInstance, item: ItemInstance, d: PlanItemDef) -> None:
        retry = inst.sub_case_retries.get(item.id, 0)
        suffix = f".r{retry}" if retry else ""
        child_id = f"{inst.instance_id}.{item.id}{suffix}"
        inst.sub_case_retries[item.id] = retry + 1
        child_model = self.resolve_model(d.case_model_id) if d.case_model_id else None
        if child_model is None:
            logger.warning("case task %s: model %r unavailable", item.id, d.case_model_id)
            self._transition(inst, item, "fault", ENGINE_ACTOR)
            return
        inst.sub_cases[item.id] = child_id
        self._subcase_parent[child_id] = (inst.instance_id, item.id)
        if not self.replay:
            self.create_instance(child_model, instance_id=child_id)

    # ----------------------------------------------------- transitions (case)

    def _case_transition(self, inst: CaseInstance, event: str, actor: str) -> None:
        new_state = lifecycle.apply_transition(ElementKind.CASE, inst.case_state, event)
        was = inst.case_state
        inst.case_state = new_state
        self._emit(inst, CASE_TARGET, event, actor)
        if event == "suspend":
            self._suspend_children(inst, CASE_TARGET)
        elif event == "reactivate" and was is S.SUSPENDED:
            self._resume_children(inst, CASE_TARGET)
        elif event in ("terminate", "complete"):
            self._terminate_children(inst, CASE_TARGET)
        if event in ("complete", "terminate") and inst.instance_id in self._subcase_parent:
            parent_id, task_iid = self._subcase_parent[inst.instance_id]
            outcome = "complete" if event == "complete" else "fault"
            self._pending_notes.append((parent_id, task_iid, outcome, inst.instance_id))

    def _flush_notes(self) -> None:
        if self._op_depth:
            return
        while self._pending_notes:
            parent_id, task_iid, outcome, child_id = self._pending_notes.popleft()
            parent = self.instances.get(parent_id)
            if parent is None:
                continue
            task = parent.items.get(task_iid)
            if task is None or task.state is not S.ACTIVE:
                continue
            try:
                self.worker_action(parent, f"{SUBCASE_PREFIX}{child_id}", task_iid, outcome)
            except CasewrightError as exc:
                # e.g. the parent case is suspended; the task stays active and
                # a worker resolves it manually
                logger.warning("sub-case notification for %s dropped: %s", task_iid, exc)

    # ----------------------------------------------------------- instantiation

    def _instantiate(self, inst: CaseInstance, d: PlanItemDef, parent: str) -> ItemInstance:
        index = inst._def_counts.get(d.id, 0)
        inst._def_counts[d.id] = index + 1
        item = ItemInstance(
            id=f"{d.id}#{index}",
            definition_id=d.id,
            parent=parent,
            state=lifecycle.apply_transition(lifecycle_kind(d.kind), None, "create"),
            index=index,
            discretionary=d.discretionary,
        )
        inst.items[item.id] = item
        if d.kind is ItemKind.TIMER_LISTENER:
            item.timer_deadline = inst.logical_clock + (d.duration_ticks or 0)
        self._emit(inst, item.id, "create", ENGINE_ACTOR)
        for sentry in d.entry_criteria:
            inst.sentries[(item.id, sentry.id)] = SentryRuntime(item.id, sentry, "entry")
        for sentry in d.exit_criteria:
            inst.sentries[(item.id, sentry.id)] = SentryRuntime(item.id, sentry, "exit")
        if not d.entry_criteria:
            if d.kind in (ItemKind.MILESTONE, ItemKind.TIMER_LISTENER, ItemKind.USER_LISTENER):
                pass  # available-armed: milestones occur via criteria or not at all
            elif d.decorators.manual_activation:
                self._transition(inst, item, "enable", ENGINE_ACTOR)
            else:
                self._transition(inst, item, "start", ENGINE_ACTOR)
        else:
            for sentry in d.entry_criteria:
                if not sentry.on_parts:
                    self._attempt_fire(inst, inst.sentries[(item.id, sentry.id)])
        return item

    # ------------------------------------------------------------ the cascade

    def _drain(self, inst: CaseInstance) -> None:
        steps = 0
        while True:
            while inst._queue:
                steps += 1
                if steps > self.cascade_limit:
                    raise CascadeLimitExceeded(
                        f"more than {self.cascade_limit} events from one stimulus"
                    )
                note = inst._queue.popleft()
                self._react(inst, note)
            if not self._fire_completions(inst):
                break

    def _react(self, inst: CaseInstance, note) -> None:
        source, name = note.source, note.name
        # 1. accumulate observations; remember which sentries just completed
        completed: list[SentryRuntime] = []
        for s in inst.sentries.values():
            if not self._owner_exists(inst, s):
                continue
            matched = False
            for idx, part in enumerate(s.sentry.on_parts):
                if idx in s.observed:
                    continue
                if self._on_part_matches(inst, part, source, name):
                    s.observed.add(idx)
                    matched = True
            if matched and len(s.observed) == len(s.sentry.on_parts):
                completed.append(s)
        # ties between simultaneously satisfied criteria resolve in model
        # document order
        for s in sorted(completed, key=lambda s: inst.index.order(s.sentry.id)):
            self._attempt_fire(inst, s)
        # 2. ifPart-only sentries are re-evaluated after every data mutation
        if (isinstance(note, StandardEvent) and name in lifecycle.CASE_FILE_EVENTS
                and source not in inst.items and source not in (CASE_TARGET, "clock")):
            for s in self._sentries_in_doc_order(inst):
                if not s.sentry.on_parts:
                    self._attempt_fire(inst, s)
        # 3. thaw: owners that just became eligible re-attempt pending sentries
        if name in ("resume", "parentResume") and source in inst.items:
            for s in self._sentries_in_doc_order(inst):
                if s.owner == source and s.pending:
                    self._attempt_fire(inst, s)
            self._check_timers(inst)
        if source == CASE_TARGET and name == "reactivate":
            for s in self._sentries_in_doc_order(inst):
                if s.pending:
                    self._attempt_fire(inst, s)
            self._check_timers(inst)

    def _owner_exists(self, inst: CaseInstance, s: SentryRuntime) -> bool:
        return s.owner == CASE_TARGET or s.owner in inst.items

    def _sentries_in_doc_order(self, inst: CaseInstance) -> list[SentryRuntime]:
        return sorted(inst.sentries.values(), key=lambda s: inst.index.order(s.sentry.id))

    def _on_part_matches(self, inst: CaseInstance, part, source: str, name: str) -> bool:
        if part.event is None:  # criterion-to-criterion link
            return name == "satisfied" and source == part.source
        if name != part.event:
            return False
        item = inst.items.get(source)
        if item is not None:
            return item.definition_id == part.source
        return source == part.source  # case file path match

    def _sentry_eligible(self, inst: CaseInstance, s: SentryRuntime) -> bool:
        if inst.case_state is not S.ACTIVE:
            return False
        if s.role == "case_exit":
            return True
        owner = inst.items.get(s.owner)
        if owner is None:
            return False
        if s.role == "entry":
            return owner.state is S.AVAILABLE and self._parents_active(inst, owner)
        return owner.state in _NONTERMINAL

    def _parents_active(self, inst: CaseInstance, item: ItemInstance) -> bool:
        parent = item.parent
        while parent != CASE_TARGET:
            node = inst.items.get(parent)
            if node is None or node.state is not S.ACTIVE:
                return False
            parent = node.parent
        return inst.case_state is S.ACTIVE

    def _attempt_fire(self, inst: CaseInstance, s: SentryRuntime) -> None:
        if len(s.observed) != len(s.sentry.on_parts):
            return
        if not self._sentry_eligible(inst, s):
            s.pending = True
            return
        s.pending = False
        if s.sentry.if_part is not None and not self._if_part_holds(inst, s.sentry):
            return
        s.observed.clear()
        logger.debug("%s: criterion %s fired for %s", inst.instance_id, s.sentry.id, s.owner)
        if s.role == "case_exit":
            self._case_transition(inst, "terminate", ENGINE_ACTOR)
        elif s.role == "exit":
            self._transition(inst, inst.items[s.owner], "exit", ENGINE_ACTOR)
        else:
            self._fire_entry(inst, inst.items[s.owner])
        inst._queue.append(_Satisfied(source=s.sentry.id))

    def _if_part_holds(self, inst: CaseInstance, sentry: Sentry) -> bool:
        expr = self._expr_cache.get(sentry.if_part)
        if expr is None:
            expr = expressions.parse_expression(sentry.if_part)
            self._expr_cache[sentry.if_part] = expr
        try:
            return expressions.evaluate_expression(expr, inst)
        except EvaluationError as exc:
            logger.warning("%s: ifPart of %s failed (%s); treated as unsatisfied",
                           inst.instance_id, sentry.id, exc)
            return False

    def _fire_entry(self, inst: CaseInstance, item: ItemInstance) -> None:
        d = inst.index.items[item.definition_id]
        if d.kind in (ItemKind.MILESTONE, ItemKind.TIMER_LISTENER, ItemKind.USER_LISTENER):
            self._transition(inst, item, "occur", ENGINE_ACTOR)
        elif d.decorators.manual_activation:
            self._transition(inst, item, "enable", ENGINE_ACTOR)
        else:
            self._transition(inst, item, "start", ENGINE_ACTOR)
        if d.decorators.repetition:
            self._instantiate(inst, d, parent=item.parent)

    def _check_timers(self, inst: CaseInstance) -> None:
        if inst.case_state is not S.ACTIVE:
            return
        due = [
            item for item in inst.items.values()
            if item.timer_deadline is not None
            and item.state is S.AVAILABLE
            and item.timer_deadline <= inst.logical_clock
            and self._parents_active(inst, item)
        ]
        for item in due:
            self._transition(inst, item, "occur", ENGINE_ACTOR)

    # --------------------------------------------------------------- completion

    def _completion_blockers(self, inst: CaseInstance, scope: str) -> list[str]:
        """Why the scope cannot complete now (empty list = completable).

        A scope completes when no child is running or pending a decision,
        every decorator-required child has completed or occurred, and every
        child that ever started reached a terminal state."""
        blockers: list[str] = []
        children = [i for i in inst.items.values() if i.parent == scope]
        for child in children:
            if child.state in _BLOCKS_COMPLETION:
                blockers.append(f"{child.id} is {child.state.value}")
            elif child.has_started and child.state not in (S.COMPLETED, S.OCCURRED, S.TERMINATED):
                blockers.append(f"{child.id} started but did not finish")
        if scope == CASE_TARGET:
            defs = inst.model.plan.children
        else:
            defs = inst.index.items[inst.items[scope].definition_id].children
        for d in defs:
            if not d.decorators.required:
                continue
            instances = [i for i in children if i.definition_id == d.id]
            if not any(i.state in _SATISFIES_REQUIRED for i in instances):
                blockers.append(f"required {d.id} is not completed")
        return blockers

    def _fire_completions(self, inst: CaseInstance) -> bool:
        scopes: list[tuple[int, int, str]] = []
        for item in inst.items.values():
            d = inst.index.items[item.definition_id]
            if d.kind is ItemKind.STAGE and item.state is S.ACTIVE and d.decorators.auto_complete:
                scopes.append((-self._depth(inst, item), inst.index.order(d.id), item.id))
        scopes.sort()
        for _, _, scope_id in scopes:
            if not self._completion_blockers(inst, scope_id):
                self._transition(inst, inst.items[scope_id], "complete", ENGINE_ACTOR)
                return True
        if (inst.model.auto_complete and inst.case_state is S.ACTIVE
                and not self._completion_blockers(inst, CASE_TARGET)):
            self._case_transition(inst, "complete", ENGINE_ACTOR)
            return True
        return False

    def _depth(self, inst: CaseInstance, item: ItemInstance) -> int:
        depth = 0
        parent = item.parent
        while parent != CASE_TARGET:
            depth += 1
            parent = inst.items[parent].parent
        return depth

    # --------------------------------------------------------- worker actions

    def _resolve_target(self, inst: CaseInstance, target: str) -> ItemInstance:
        item = inst.items.get(target)
        if item is not None:
            return item
        candidates = [i for i in inst.items.values() if i.definition_id == target]
        if not candidates:
            raise UnknownTarget(f"unknown item {target!r}")
        return max(candidates, key=lambda i: i.index)

    def _item_action(self, inst: CaseInstance, actor: str, item: ItemInstance,
                     action: str, payload: object) -> None:
        d = inst.index.items[item.definition_id]
        kind = lifecycle_kind(d.kind)
        if action == CLAIM_MARKER:
            self._claim(inst, actor, item, d)
            return
        if action == "complete":
            self._complete_action(inst, actor, item, d, payload)
            return
        if action == "occur":
            self._check_permission(inst, actor, "execute_tasks")
            if d.kind is not ItemKind.USER_LISTENER:
                raise IllegalTransition(kind, item.state.value, action)
            self._transition(inst, item, "occur", actor)
            return
        if action == "fault" and actor.startswith(SUBCASE_PREFIX):
            self._transition(inst, item, "fault", actor)
            return
        self._check_permission(inst, actor, _PERMISSION_FOR.get(action, "close_case"))
        if not lifecycle.is_legal(kind, item.state, action) or not lifecycle.worker_initiated(kind, action):
            raise IllegalTransition(kind, item.state.value, action)
        if action in ("resume", "reactivate", "manualStart") and not self._parents_active(inst, item):
            raise IllegalTransition(kind, item.state.value, action)
        if action == "resume" and item.suspended_by is not None:
            raise IllegalTransition(kind, item.state.value, action)
        self._transition(inst, item, action, actor, payload=payload)

    def _claim(self, inst: CaseInstance, actor: str, item: ItemInstance, d: PlanItemDef) -> None:
        self._check_permission(inst, actor, "execute_tasks")
        if d.kind not in HUMAN_TASK_KINDS:
            raise IllegalTransition(lifecycle_kind(d.kind), item.state.value, CLAIM_MARKER)
        if item.state is not S.ACTIVE:
            raise IllegalTransition(lifecycle_kind(d.kind), item.state.value, CLAIM_MARKER)
        if item.claimed_by is not None:
            raise NotClaimed(f"{item.id} is already claimed by {item.claimed_by!r}")
        item.claimed_by = actor
        self._emit(inst, item.id, CLAIM_MARKER, actor)
        if d.kind is ItemKind.HUMAN_TASK_NONBLOCKING:
            # handed out and considered complete as soon as it is claimed
            self._transition(inst, item, "complete", ENGINE_ACTOR)

    def _complete_action(self, inst: CaseInstance, actor: str, item: ItemInstance,
                         d: PlanItemDef, payload: object) -> None:
        if d.kind is ItemKind.STAGE:
            self._check_permission(inst, actor, "close_case")
            if item.state is not S.ACTIVE:
                raise IllegalTransition(ElementKind.STAGE, item.state.value, "complete")
            blockers = self._completion_blockers(inst, item.id)
            if blockers:
                raise RequiredIncomplete(blockers)
            self._transition(inst, item, "complete", actor)
            return
        if d.kind in HUMAN_TASK_KINDS or d.kind in (ItemKind.PROCESS_TASK, ItemKind.CASE_TASK):
            if not actor.startswith(SUBCASE_PREFIX):
                self._check_permission(inst, actor, "execute_tasks")
        if item.state is not S.ACTIVE:
            raise IllegalTransition(lifecycle_kind(d.kind), item.state.value, "complete")
        if d.kind is ItemKind.HUMAN_TASK_BLOCKING:
            if item.claimed_by != actor:
                raise NotClaimed(
                    f"{item.id} must be claimed by the completing worker"
                    if item.claimed_by is None
                    else f"{item.id} is claimed by {item.claimed_by!r}"
                )
            self._transition(inst, item, "complete", actor, payload=payload)
            return
        if d.kind is ItemKind.HUMAN_TASK_NONBLOCKING:
            raise NotClaimed(f"{item.id} completes when it is claimed")
        if d.kind in (ItemKind.PROCESS_TASK, ItemKind.CASE_TASK):
            self._transition(inst, item, "complete", actor, payload=payload)
            return
        raise IllegalTransition(lifecycle_kind(d.kind), item.state.value, "complete")

    def _case_action(self, inst: CaseInstance, actor: str, action: str) -> None:
        if action == "complete":
            self._check_permission(inst, actor, "close_case")
            if inst.case_state is not S.ACTIVE:
                raise IllegalTransition(ElementKind.CASE, inst.case_state.value, "complete")
            blockers = self._completion_blockers(inst, CASE_TARGET)
            if blockers:
                raise RequiredIncomplete(blockers)
            self._case_transition(inst, "complete", actor)
            return
        self._check_permission(inst, actor, _PERMISSION_FOR.get(action, "close_case"))
        if not lifecycle.is_legal(ElementKind.CASE, inst.case_state, action) \
                or not lifecycle.worker_initiated(ElementKind.CASE, action):
            raise IllegalTransition(ElementKind.CASE, inst.case_state.value, action)
        self._case_transition(inst, action, actor)

    # ------------------------------------------------------------- case file

    def _case_file_apply(self, inst: CaseInstance, actor: str, op: str,
                         path: str, payload: object) -> None:
        if op not in lifecycle.CASE_FILE_EVENTS:
            raise IllegalTransition(ElementKind.CASE_FILE_ITEM, None, op)
        if op == "create":
            declared = inst.index.paths.get(path)
            if declared is None:
                raise NoSuchPath(f"{path!r} is not declared in the case file schema")
            if "/" in path:
                parent_path = path.rsplit("/", 1)[0]
                parent = inst.case_file.get(parent_path)
                if parent is None or not parent.exists:
                    raise NoSuchPath(f"parent {parent_path!r} does not exist")
            entry = inst.case_file.get(path)
            lifecycle.apply_transition(ElementKind.CASE_FILE_ITEM,
                                       entry.state if entry else None, "create")
            new_entry = CaseFileEntry(path=path, container=declared.container,
                                      declared=True, revision=1, value=payload)
            inst.case_file[path] = new_entry
            if "/" in path:
                inst.case_file[path.rsplit("/", 1)[0]].children.add(path)
            self._emit(inst, path, "create", actor, payload=payload)
            return
        if op == "addChild":
            if "/" not in path:
                raise NoSuchPath(f"{path!r} does not name a child inside a container")
            parent_path, _ = path.rsplit("/", 1)
            parent = inst.case_file.get(parent_path)
            if parent is None or not parent.exists:
                raise NoSuchPath(f"container {parent_path!r} does not exist")
            if not parent.container:
                raise NotAContainer(f"{parent_path!r} is not a container")
            if path in inst.case_file and inst.case_file[path].exists:
                raise IllegalTransition(ElementKind.CASE_FILE_ITEM, S.AVAILABLE.value, "create")
            inst.case_file[path] = CaseFileEntry(path=path, declared=False,
                                                 revision=1, value=payload)
            parent.children.add(path)
            parent.revision += 1
            self._emit(inst, parent_path, "addChild", actor,
                       payload={"path": path, "value": payload})
            return
        entry = inst.case_file.get(path)
        if entry is None or (entry.deleted and op != "delete"):
            raise NoSuchPath(f"{path!r} does not exist")
        if op == "removeChild":
            parent_path = path.rsplit("/", 1)[0] if "/" in path else None
            parent = inst.case_file.get(parent_path) if parent_path else None
            if parent is None or not parent.container:
                raise NotAContainer(f"{path!r} is not inside a container")
            lifecycle.apply_transition(ElementKind.CASE_FILE_ITEM, entry.state, "removeChild")
            self._forget(inst, entry)
            parent.children.discard(path)
            parent.revision += 1
            self._emit(inst, parent_path, "removeChild", actor, payload={"path": path})
            return
        # plain data events on the item itself
        lifecycle.apply_transition(ElementKind.CASE_FILE_ITEM, entry.state, op)
        if op == "replace":
            entry.value = payload
        elif op == "update":
            if isinstance(entry.value, dict) and isinstance(payload, dict):
                entry.value = {**entry.value, **payload}
            else:
                entry.value = payload
        elif op == "addReference":
            entry.references.add(str(payload))
        elif op == "removeReference":
            if str(payload) not in entry.references:
                raise NoSuchPath(f"no reference {payload!r} on {path!r}")
            entry.references.discard(str(payload))
        elif op == "delete":
            if "/" in path:
                parent = inst.case_file.get(path.rsplit("/", 1)[0])
                if parent is not None:
                    parent.children.discard(path)
                    parent.revision += 1
            if entry.declared:
                entry.exists = False
                entry.deleted = True
                for child_path in sorted(entry.children):
                    child = inst.case_file.get(child_path)
                    if child is not None:
                        self._forget(inst, child)
                entry.children.clear()
            else:
                self._forget(inst, entry)
        entry.revision += 1
        self._emit(inst, path, op, actor, payload=payload)

    def _forget(self, inst: CaseInstance, entry: CaseFileEntry) -> None:
        """Dynamic children vanish entirely so the same name can be re-added."""
        for child_path in sorted(entry.children):
            child = inst.case_file.get(child_path)
            if child is not None:
                self._forget(inst, child)
        inst.case_file.pop(entry.path, None)

    # ---------------------------------------------------------------- planning

    def _planning_scope(self, inst: CaseInstance, scope: str):
        """Returns (table, parent-for-new-instances, scope-is-active)."""
        if scope == CASE_TARGET:
            return inst.model.case_planning_table, CASE_TARGET, inst.case_state is S.ACTIVE
        item = self._resolve_target(inst, scope)
        d = inst.index.items[item.definition_id]
        if d.kind is ItemKind.STAGE:
            parent = item.id
        elif d.kind in HUMAN_TASK_KINDS:
            # items planned from a human task live in the task's parent scope
            parent = item.parent
        else:
            return None, item.id, item.state is S.ACTIVE
        return d.planning_table, parent, item.state is S.ACTIVE

    def _plannable(self, inst: CaseInstance, actor: str | None) -> list[dict]:
        out = []
        scopes: list[tuple[str, str, object]] = []
        if inst.case_state is S.ACTIVE and inst.model.case_planning_table is not None:
            scopes.append((CASE_TARGET, inst.model.name, inst.model.case_planning_table))
        for item in inst.items.values():
            d = inst.index.items[item.definition_id]
            if d.planning_table is not None and item.state is S.ACTIVE:
                scopes.append((item.id, d.name, d.planning_table))
        for scope_id, scope_name, table in scopes:
            if actor is not None and not self.replay:
                perms = self._actor_permissions(inst, actor)
                if perms is not None:
                    if "plan" not in perms:
                        continue
                    if table.authorized_roles and not (
                        self.workers.get(actor, set()) & table.authorized_roles
                    ):
                        continue
            parent = self._planning_scope(inst, scope_id)[1]
            for entry in table.entries:
                members = entry.children if entry.kind is ItemKind.FRAGMENT else (entry,)
                already = any(
                    not m.decorators.repetition and any(
                        i.definition_id == m.id and i.parent == parent
                        for i in inst.items.values()
                    )
                    for m in members
                )
                if already:
                    continue
                out.append({
                    "scope": scope_id,
                    "scopeName": scope_name,
                    "entry": entry.id,
                    "name": entry.name,
                    "kind": entry.kind.value,
                    "members": [m.id for m in entry.children] if entry.kind is ItemKind.FRAGMENT else [],
                })
        return out

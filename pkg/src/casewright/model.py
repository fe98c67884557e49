"""Static case-model object graph: native JSON format, linking, validation.

A model document is UTF-8 JSON with top-level keys
{"id","name","roles","caseFile","plan","exitCriteria","planningTable",
"autoComplete"}.  Plan items are nested objects discriminated by "kind";
sentries are {"id","on":[{"source","event"}],"if":"<expr>"}.  The shipped
JSON Schema (schema/model.schema.json) is enforced by parse_model before
linking.

Models are immutable after parse and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import jsonschema

from . import expressions, lifecycle
from .errors import DuplicateId, ModelSyntaxError, UnresolvedReference

PERMISSIONS = frozenset({
    "plan", "manual_activate", "suspend_resume", "modify_case_file",
    "close_case", "execute_tasks", "reactivate",
})


class ItemKind(str, Enum):
    STAGE = "stage"
    HUMAN_TASK_BLOCKING = "human_task_blocking"
    HUMAN_TASK_NONBLOCKING = "human_task_nonblocking"
    PROCESS_TASK = "process_task"
    CASE_TASK = "case_task"
    MILESTONE = "milestone"
    TIMER_LISTENER = "timer_listener"
    USER_LISTENER = "user_listener"
    FRAGMENT = "fragment"

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


TASK_KINDS = frozenset({
    ItemKind.HUMAN_TASK_BLOCKING, ItemKind.HUMAN_TASK_NONBLOCKING,
    ItemKind.PROCESS_TASK, ItemKind.CASE_TASK,
})
HUMAN_TASK_KINDS = frozenset({
    ItemKind.HUMAN_TASK_BLOCKING, ItemKind.HUMAN_TASK_NONBLOCKING,
})
LISTENER_KINDS = frozenset({ItemKind.TIMER_LISTENER, ItemKind.USER_LISTENER})


def lifecycle_kind(kind: ItemKind) -> lifecycle.ElementKind:
    if kind is ItemKind.STAGE:
        return lifecycle.ElementKind.STAGE
    if kind in TASK_KINDS:
        return lifecycle.ElementKind.TASK
    if kind is ItemKind.MILESTONE:
        return lifecycle.ElementKind.MILESTONE
    if kind in LISTENER_KINDS:
        return lifecycle.ElementKind.LISTENER
    raise ValueError(f"{kind} has no lifecycle")


@dataclass(frozen=True)
class OnPart:
    source: str
    event: str | None = None  # None only for criterion-to-criterion links


@dataclass(frozen=True)
class Sentry:
    id: str
    on_parts: tuple[OnPart, ...] = ()
    if_part: str | None = None


@dataclass(frozen=True)
class DecoratorSet:
    auto_complete: bool = False
    manual_activation: bool = False
    required: bool = False
    repetition: bool = False

    def any(self) -> bool:
        return self.auto_complete or self.manual_activation or self.required or self.repetition


@dataclass(frozen=True)
class PlanItemDef:
    """One node of the model: stage, task, milestone, listener, or fragment.

    Fragments reuse this shape with their members in ``children``;
    discretionary items carry ``discretionary=True`` and live in planning
    tables rather than in a stage's children.
    """

    id: str
    name: str
    kind: ItemKind
    entry_criteria: tuple[Sentry, ...] = ()
    exit_criteria: tuple[Sentry, ...] = ()
    decorators: DecoratorSet = DecoratorSet()
    children: tuple["PlanItemDef", ...] = ()
    planning_table: "PlanningTable | None" = None
    discretionary: bool = False
    collapsed: bool = False
    # kind-specific payload
    duration_ticks: int | None = None  # timer_listener
    process_key: str | None = None  # process_task
    case_model_id: str | None = None  # case_task


@dataclass(frozen=True)
class PlanningTable:
    entries: tuple[PlanItemDef, ...] = ()
    authorized_roles: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CaseFileItemDef:
    path: str  # slash-separated, full path
    container: bool = False
    children: tuple["CaseFileItemDef", ...] = ()


@dataclass(frozen=True)
class RoleDef:
    name: str
    permissions: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CaseModel:
    id: str
    name: str
    roles: tuple[RoleDef, ...] = ()
    case_file: tuple[CaseFileItemDef, ...] = ()
    plan: PlanItemDef = PlanItemDef(id="plan", name="plan", kind=ItemKind.STAGE)
    case_exit_criteria: tuple[Sentry, ...] = ()
    case_planning_table: PlanningTable | None = None
    auto_complete: bool = False


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    element_id: str
    rule: str
    message: str


# ---------------------------------------------------------------------------
# Model index: derived lookups over an immutable model
# ---------------------------------------------------------------------------


class ModelIndex:
    """Resolved lookups for one model: ids, paths, sentries, document order."""

    def __init__(self, model: CaseModel):
        self.model = model
        self.items: dict[str, PlanItemDef] = {}
        self.sentries: dict[str, Sentry] = {}
        self.sentry_owner: dict[str, tuple[str, str]] = {}  # sentry id -> (owner id, "entry"|"exit")
        self.parent: dict[str, str | None] = {}  # item id -> containing stage/case-plan id
        self.doc_order: dict[str, int] = {}
        self.paths: dict[str, CaseFileItemDef] = {}
        self._counter = 0

        self._walk_item(model.plan, parent=None)
        for sentry in model.case_exit_criteria:
            self._add_sentry(sentry, owner=model.plan.id, role="exit")
        if model.case_planning_table:
            self._walk_table(model.case_planning_table, parent=model.plan.id)
        for item in model.case_file:
            self._walk_path(item)

    def _add(self, element_id: str) -> None:
        if element_id in self.items or element_id in self.sentries:
            raise DuplicateId(element_id)
        self.doc_order[element_id] = self._counter
        self._counter += 1

    def _add_sentry(self, sentry: Sentry, owner: str, role: str) -> None:
        self._add(sentry.id)
        self.sentries[sentry.id] = sentry
        self.sentry_owner[sentry.id] = (owner, role)

    def _walk_item(self, item: PlanItemDef, parent: str | None) -> None:
        self._add(item.id)
        self.items[item.id] = item
        self.parent[item.id] = parent
        for sentry in item.entry_criteria:
            self._add_sentry(sentry, owner=item.id, role="entry")
        for sentry in item.exit_criteria:
            self._add_sentry(sentry, owner=item.id, role="exit")
        for child in item.children:
            self._walk_item(child, parent=item.id)
        if item.planning_table:
            self._walk_table(item.planning_table, parent=parent if item.kind in TASK_KINDS else item.id)

    def _walk_table(self, table: PlanningTable, parent: str | None) -> None:
        # Discretionary items instantiate inside the scope that owns the
        # table; for a human task's table that is the task's parent stage.
        for entry in table.entries:
            self._walk_item(entry, parent=parent)

    def _walk_path(self, item: CaseFileItemDef) -> None:
        if item.path in self.paths:
            raise DuplicateId(item.path)
        self.paths[item.path] = item
        for child in item.children:
            self._walk_path(child)

    def resolve_on_part(self, part: OnPart) -> str:
        """Classify an onPart source: 'element', 'path', or 'criterion'."""
        if part.source in self.items:
            return "element"
        if part.source in self.paths:
            return "path"
        if part.source in self.sentries:
            return "criterion"
        raise UnresolvedReference(part.source, "onPart")

    def order(self, element_id: str) -> int:
        return self.doc_order.get(element_id, 1 << 30)


_SCHEMA: dict | None = None


def model_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        raw = resources.files("casewright").joinpath("schema/model.schema.json").read_text()
        _SCHEMA = json.loads(raw)
    return _SCHEMA


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_model(text: str) -> CaseModel:
    """Parse and link a model document.

    Raises ModelSyntaxError (malformed JSON or schema violation, with a
    position), DuplicateId, or UnresolvedReference.  The returned model is
    fully linked: every onPart source resolves to an element id, a case file
    path, or a criterion id.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, position=f"line {exc.lineno}, column {exc.colno}") from exc

    validator = jsonschema.Draft202012Validator(model_schema())
    for error in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        pointer = "/" + "/".join(str(p) for p in error.absolute_path)
        raise ModelSyntaxError(error.message, position=pointer)

    model = _build_model(doc)
    index = ModelIndex(model)  # raises DuplicateId
    for sentry in index.sentries.values():
        for part in sentry.on_parts:
            index.resolve_on_part(part)  # raises UnresolvedReference
    return model


def _build_model(doc: dict) -> CaseModel:
    roles = tuple(
        RoleDef(name=r["name"], permissions=frozenset(r.get("permissions", [])))
        for r in doc.get("roles", [])
    )
    seen_roles = set()
    for role in roles:
        if role.name in seen_roles:
            raise DuplicateId(role.name)
        seen_roles.add(role.name)
    case_file = tuple(_build_case_file_item(i, prefix="") for i in doc.get("caseFile", []))
    plan_doc = dict(doc["plan"])
    plan_doc.setdefault("kind", "stage")
    plan = _build_item(plan_doc)
    return CaseModel(
        id=doc["id"],
        name=doc.get("name", doc["id"]),
        roles=roles,
        case_file=case_file,
        plan=plan,
        case_exit_criteria=tuple(
            _build_sentry(s, f"{doc['id']}-exit-{i}") for i, s in enumerate(doc.get("exitCriteria", []))
        ),
        case_planning_table=_build_table(doc.get("planningTable")),
        auto_complete=bool(doc.get("autoComplete", False)),
    )


def _build_case_file_item(doc: dict, prefix: str) -> CaseFileItemDef:
    path = f"{prefix}{doc['name']}"
    children = tuple(
        _build_case_file_item(c, prefix=f"{path}/") for c in doc.get("children", [])
    )
    return CaseFileItemDef(
        path=path,
        container=bool(doc.get("container", False)),
        children=children,
    )


def _build_sentry(doc: dict, default_id: str) -> Sentry:
    return Sentry(
        id=doc.get("id", default_id),
        on_parts=tuple(OnPart(source=p["source"], event=p.get("event")) for p in doc.get("on", [])),
        if_part=doc.get("if"),
    )


def _build_item(doc: dict, discretionary: bool = False) -> PlanItemDef:
    kind = ItemKind(doc["kind"])
    item_id = doc["id"]
    decorators_doc = doc.get("decorators", {})
    children_key = "items" if kind is ItemKind.FRAGMENT else "children"
    # Only fragment members inherit discretionary status: the children of a
    # discretionary stage are ordinary plan items once the stage is planned.
    children = tuple(
        _build_item(c, discretionary=kind is ItemKind.FRAGMENT)
        for c in doc.get(children_key, [])
    )
    return PlanItemDef(
        id=item_id,
        name=doc.get("name", item_id),
        kind=kind,
        entry_criteria=tuple(
            _build_sentry(s, f"{item_id}-entry-{i}") for i, s in enumerate(doc.get("entry", []))
        ),
        exit_criteria=tuple(
            _build_sentry(s, f"{item_id}-exit-{i}") for i, s in enumerate(doc.get("exit", []))
        ),
        decorators=DecoratorSet(
            auto_complete=bool(decorators_doc.get("autoComplete", False)),
            manual_activation=bool(decorators_doc.get("manualActivation", False)),
            required=bool(decorators_doc.get("required", False)),
            repetition=bool(decorators_doc.get("repetition", False)),
        ),
        children=children,
        planning_table=_build_table(doc.get("planningTable")),
        discretionary=discretionary,
        collapsed=bool(doc.get("collapsed", False)),
        duration_ticks=doc.get("durationTicks"),
        process_key=doc.get("processKey"),
        case_model_id=doc.get("caseModelId"),
    )


def _build_table(doc: dict | None) -> PlanningTable | None:
    if doc is None:
        return None
    return PlanningTable(
        entries=tuple(_build_item(e, discretionary=True) for e in doc.get("entries", [])),
        authorized_roles=frozenset(doc.get("roles", [])),
    )


# ---------------------------------------------------------------------------
# Serialization (parsing a serialized model reproduces it exactly)
# ---------------------------------------------------------------------------


def serialize_model(model: CaseModel) -> str:
    doc: dict = {"id": model.id, "name": model.name}
    if model.roles:
        doc["roles"] = [
            {"name": r.name, "permissions": sorted(r.permissions)} for r in model.roles
        ]
    if model.case_file:
        doc["caseFile"] = [_case_file_doc(i) for i in model.case_file]
    doc["plan"] = _item_doc(model.plan)
    if model.case_exit_criteria:
        doc["exitCriteria"] = [_sentry_doc(s) for s in model.case_exit_criteria]
    if model.case_planning_table:
        doc["planningTable"] = _table_doc(model.case_planning_table)
    if model.auto_complete:
        doc["autoComplete"] = True
    return json.dumps(doc, indent=2) + "\n"


def _case_file_doc(item: CaseFileItemDef) -> dict:
    doc: dict = {"name": item.path.rsplit("/", 1)[-1]}
    if item.container:
        doc["container"] = True
    if item.children:
        doc["children"] = [_case_file_doc(c) for c in item.children]
    return doc


def _sentry_doc(sentry: Sentry) -> dict:
    doc: dict = {"id": sentry.id}
    if sentry.on_parts:
        doc["on"] = [
            {"source": p.source, **({"event": p.event} if p.event else {})}
            for p in sentry.on_parts
        ]
    if sentry.if_part is not None:
        doc["if"] = sentry.if_part
    return doc


def _item_doc(item: PlanItemDef) -> dict:
    doc: dict = {"kind": item.kind.value, "id": item.id, "name": item.name}
    if item.entry_criteria:
        doc["entry"] = [_sentry_doc(s) for s in item.entry_criteria]
    if item.exit_criteria:
        doc["exit"] = [_sentry_doc(s) for s in item.exit_criteria]
    if item.decorators.any():
        dec = {}
        if item.decorators.auto_complete:
            dec["autoComplete"] = True
        if item.decorators.manual_activation:
            dec["manualActivation"] = True
        if item.decorators.required:
            dec["required"] = True
        if item.decorators.repetition:
            dec["repetition"] = True
        doc["decorators"] = dec
    if item.children:
        key = "items" if item.kind is ItemKind.FRAGMENT else "children"
        doc[key] = [_item_doc(c) for c in item.children]
    if item.planning_table:
        doc["planningTable"] = _table_doc(item.planning_table)
    if item.collapsed:
        doc["collapsed"] = True
    if item.duration_ticks is not None:
        doc["durationTicks"] = item.duration_ticks
    if item.process_key is not None:
        doc["processKey"] = item.process_key
    if item.case_model_id is not None:
        doc["caseModelId"] = item.case_model_id
    return doc


def _table_doc(table: PlanningTable) -> dict:
    doc: dict = {"entries": [_item_doc(e) for e in table.entries]}
    if table.authorized_roles:
        doc["roles"] = sorted(table.authorized_roles)
    return doc


# ---------------------------------------------------------------------------
# Validation: the decorator/criterion applicability matrix plus structure
# ---------------------------------------------------------------------------

_ALL_FEATURES = frozenset({
    "planning_table", "entry_criterion", "exit_criterion", "auto_complete",
    "collapsed", "manual_activation", "repetition", "required",
})

# Which features each element admits.  Keyed by (row, discretionary); rows
# are ItemKind values plus "case_plan".  Empty set = bare element.
_MATRIX: dict[tuple[str, bool], frozenset[str]] = {
    ("case_plan", False): frozenset({"planning_table", "exit_criterion", "auto_complete"}),
    ("stage", False): _ALL_FEATURES,
    ("stage", True): _ALL_FEATURES - {"required"},
    ("human_task_blocking", False): frozenset({
        "planning_table", "entry_criterion", "exit_criterion",
        "manual_activation", "repetition", "required"}),
    ("human_task_blocking", True): frozenset({
        "planning_table", "entry_criterion", "exit_criterion",
        "manual_activation", "repetition"}),
    ("human_task_nonblocking", False): frozenset({
        "planning_table", "entry_criterion", "manual_activation",
        "repetition", "required"}),
    ("human_task_nonblocking", True): frozenset({
        "planning_table", "entry_criterion", "manual_activation", "repetition"}),
    ("process_task", False): frozenset({
        "entry_criterion", "exit_criterion", "manual_activation",
        "repetition", "required"}),
    ("process_task", True): frozenset({
        "entry_criterion", "exit_criterion", "manual_activation", "repetition"}),
    ("case_task", False): frozenset({
        "entry_criterion", "exit_criterion", "manual_activation",
        "repetition", "required"}),
    ("case_task", True): frozenset({
        "entry_criterion", "exit_criterion", "manual_activation", "repetition"}),
    ("milestone", False): frozenset({"entry_criterion", "repetition", "required"}),
    ("timer_listener", False): frozenset(),
    ("user_listener", False): frozenset(),
    ("fragment", False): frozenset({"collapsed"}),
}


def applicability_matrix() -> dict[tuple[str, bool], frozenset[str]]:
    return dict(_MATRIX)


def _features_of(item: PlanItemDef) -> set[str]:
    present = set()
    if item.planning_table is not None:
        present.add("planning_table")
    if item.entry_criteria:
        present.add("entry_criterion")
    if item.exit_criteria:
        present.add("exit_criterion")
    if item.decorators.auto_complete:
        present.add("auto_complete")
    if item.collapsed:
        present.add("collapsed")
    if item.decorators.manual_activation:
        present.add("manual_activation")
    if item.decorators.repetition:
        present.add("repetition")
    if item.decorators.required:
        present.add("required")
    return present


_FEATURE_RULES = {
    "planning_table": "RULE_PLANNING_TABLE_NOT_ALLOWED",
    "entry_criterion": "RULE_ENTRY_NOT_ALLOWED",
    "exit_criterion": "RULE_EXIT_NOT_ALLOWED",
    "auto_complete": "RULE_AUTO_COMPLETE_NOT_ALLOWED",
    "collapsed": "RULE_COLLAPSED_NOT_ALLOWED",
    "manual_activation": "RULE_MANUAL_ACTIVATION_NOT_ALLOWED",
    "repetition": "RULE_REPETITION_NOT_ALLOWED",
    "required": "RULE_REQUIRED_NOT_ALLOWED",
}


def validate_model(model: CaseModel) -> list[Diagnostic]:
    """Pure structural validation; returns diagnostics, never mutates.

    An empty list means every decorator/criterion placement matches the
    applicability matrix and all structural invariants hold.
    """
    out: list[Diagnostic] = []
    index = ModelIndex(model)

    def err(element_id: str, rule: str, message: str) -> None:
        out.append(Diagnostic("error", element_id, rule, message))

    def check_item(item: PlanItemDef, row: str) -> None:
        discretionary = item.discretionary and row != "fragment"
        if (row, discretionary) not in _MATRIX:
            err(item.id, "RULE_DISCRETIONARY_KIND", f"{row} cannot be discretionary")
            return
        allowed = _MATRIX[(row, discretionary)]
        present = _features_of(item)
        for feature in sorted(present - allowed):
            if feature == "required" and discretionary and "required" in _MATRIX[(row, False)]:
                # the planned variant admits `required`: this is specifically
                # the discretionary-items-cannot-be-required rule
                err(item.id, "RULE_DISCRETIONARY_NOT_REQUIRED",
                    f"discretionary {row} cannot carry the required decorator")
            else:
                err(item.id, _FEATURE_RULES[feature],
                    f"{feature} is not applicable to {'discretionary ' if discretionary else ''}{row}")
        if "repetition" in present and "repetition" in allowed and not item.entry_criteria:
            err(item.id, "RULE_REPETITION_NEEDS_ENTRY",
                "repetition requires at least one entry criterion")
        for sentry in (*item.entry_criteria, *item.exit_criteria):
            check_sentry(sentry)
        if item.planning_table is not None and "planning_table" in allowed:
            check_table(item.planning_table, item.id)
        if item.kind is ItemKind.TIMER_LISTENER and (item.duration_ticks is None or item.duration_ticks <= 0):
            err(item.id, "RULE_TIMER_DURATION", "timer listener needs a positive durationTicks")
        if item.kind is ItemKind.PROCESS_TASK and not item.process_key:
            err(item.id, "RULE_PROCESS_KEY", "process task needs a processKey")
        if item.kind is ItemKind.CASE_TASK and not item.case_model_id:
            err(item.id, "RULE_CASE_TASK_TARGET", "case task needs a caseModelId")
        if item.kind is ItemKind.FRAGMENT and not item.children:
            err(item.id, "RULE_FRAGMENT_EMPTY", "plan fragment has no items")
        if item.kind is not ItemKind.STAGE and item.kind is not ItemKind.FRAGMENT and item.children:
            err(item.id, "RULE_CHILDREN_NOT_ALLOWED", f"{row} cannot contain plan items")
        for child in item.children:
            check_item(child, "fragment" if child.kind is ItemKind.FRAGMENT else child.kind.value)

    def check_sentry(sentry: Sentry) -> None:
        if not sentry.on_parts and sentry.if_part is None:
            err(sentry.id, "RULE_SENTRY_EMPTY", "criterion needs an onPart or an ifPart")
        if sentry.if_part is not None:
            try:
                expressions.parse_expression(sentry.if_part)
            except Exception as exc:
                err(sentry.id, "RULE_EXPRESSION_INVALID", f"ifPart does not parse: {exc}")
        for part in sentry.on_parts:
            check_on_part(sentry, part)

    def check_on_part(sentry: Sentry, part: OnPart) -> None:
        try:
            source_kind = index.resolve_on_part(part)
        except UnresolvedReference:
            err(sentry.id, "RULE_ONPART_UNRESOLVED", f"onPart source {part.source!r} does not resolve")
            return
        if source_kind == "criterion":
            if part.event is not None:
                err(sentry.id, "RULE_ONPART_EVENT_INVALID",
                    "criterion-referencing onPart must not name an event")
            return
        if part.event is None:
            err(sentry.id, "RULE_ONPART_EVENT_INVALID",
                f"onPart on {part.source!r} needs an event")
            return
        if source_kind == "path":
            valid = lifecycle.events_for_kind(lifecycle.ElementKind.CASE_FILE_ITEM)
        else:
            target = index.items[part.source]
            if target.kind is ItemKind.FRAGMENT:
                err(sentry.id, "RULE_ONPART_EVENT_INVALID", "plan fragments emit no events")
                return
            valid = lifecycle.events_for_kind(lifecycle_kind(target.kind))
        if part.event not in valid:
            err(sentry.id, "RULE_ONPART_EVENT_INVALID",
                f"{part.event!r} is not a standard event of {part.source!r}")

    def check_table(table: PlanningTable, owner_id: str) -> None:
        if not table.entries:
            err(owner_id, "RULE_PLANNING_TABLE_EMPTY", "planning table has no entries")
        for role in table.authorized_roles:
            if role not in {r.name for r in model.roles}:
                err(owner_id, "RULE_UNKNOWN_ROLE", f"planning table names unknown role {role!r}")
        for entry in table.entries:
            check_item(entry, "fragment" if entry.kind is ItemKind.FRAGMENT else entry.kind.value)

    # the case plan row: root stage plus case-level extras
    root_features = _features_of(model.plan)
    allowed_root = _MATRIX[("case_plan", False)]
    if model.case_exit_criteria:
        root_features.add("exit_criterion")
    if model.auto_complete:
        root_features.add("auto_complete")
    if model.case_planning_table is not None:
        root_features.add("planning_table")
    for feature in sorted(root_features - allowed_root):
        err(model.plan.id, _FEATURE_RULES[feature],
            f"{feature} is not applicable to the case plan")
    for sentry in model.case_exit_criteria:
        check_sentry(sentry)
    for sentry in (*model.plan.entry_criteria, *model.plan.exit_criteria):
        check_sentry(sentry)
    if model.case_planning_table is not None:
        check_table(model.case_planning_table, model.plan.id)
    if model.plan.planning_table is not None:
        check_table(model.plan.planning_table, model.plan.id)

    def check_case_file(item: CaseFileItemDef) -> None:
        if item.children and not item.container:
            err(item.path, "RULE_CASEFILE_CHILDREN", "children declared on a non-container")
        for child in item.children:
            if not child.path.startswith(item.path + "/"):
                err(child.path, "RULE_CASEFILE_PATH", "child path must extend the parent path")
            check_case_file(child)

    for item in model.case_file:
        check_case_file(item)

    for role in model.roles:
        for perm in role.permissions:
            if perm not in PERMISSIONS:
                err(role.name, "RULE_UNKNOWN_PERMISSION", f"unknown permission {perm!r}")

    for child in model.plan.children:
        check_item(child, child.kind.value)

    return out


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)

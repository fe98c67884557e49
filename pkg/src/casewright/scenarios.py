"""Deterministic scenario scripts for conformance testing.

A scenario is a line-oriented script (or an equivalent JSON list of steps)
executed against a fresh instance:

    worker ana owner,specialist        # declare a worker and its roles
    casefile ana create report {...}   # case file operation (payload optional)
    action ana sendLetter claim        # worker action on an item or "case"
    plan sup case fraudStage           # planning action
    clock 10                           # advance the logical clock
    expect case active                 # assertions; first failure aborts
    expect item sendLetter#0 active
    expect milestone received occurred
    expect milestone received occurrences 2
    expect casefile report exists

Identical script + model yield a byte-identical transcript (the event log).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import CaseInstance, Runtime
from .errors import CasewrightError
from .lifecycle import LifecycleState as S
from .model import CaseModel, ItemKind
from .persistence import Store, event_line


class ScenarioSyntaxError(CasewrightError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ExpectFailure(CasewrightError):
    def __init__(self, message: str, line: int, diff: str):
        self.line = line
        self.diff = diff
        super().__init__(f"line {line}: {message}\n{diff}")


@dataclass
class Step:
    directive: str  # worker | casefile | action | plan | clock | expect
    args: list
    line: int = 0


@dataclass
class ScenarioResult:
    transcript: list[str] = field(default_factory=list)
    steps_run: int = 0

    def transcript_text(self) -> str:
        return "".join(line + "\n" for line in self.transcript)


def parse_scenario(text: str) -> list[Step]:
    """Accepts the line format or a JSON array of {directive, args} objects."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        docs = json.loads(text)
        return [Step(directive=d["directive"], args=list(d["args"]), line=i + 1)
                for i, d in enumerate(docs)]
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive = line.split(None, 1)[0]
        if directive in ("casefile", "action"):
            # keep a trailing JSON payload intact: <dir> <actor> <x> <y> [json]
            args = line.split(None, 4)[1:]
        else:
            args = line.split()[1:]
        if directive not in ("worker", "casefile", "action", "plan", "clock", "expect"):
            raise ScenarioSyntaxError(f"unknown directive {directive!r}", lineno)
        steps.append(Step(directive=directive, args=args, line=lineno))
    return steps


def _parse_payload(args: list[str], start: int, line: int):
    if len(args) <= start:
        return None
    blob = args[start]
    try:
        return json.loads(blob)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(f"payload is not JSON: {blob!r}", line) from exc


def run_scenario(model: CaseModel, steps: list[Step], runtime: Runtime | None = None,
                 store: Store | None = None, instance_id: str | None = None,
                 snapshot_every: int | None = None) -> ScenarioResult:
    """Execute the steps against a fresh instance; abort on the first failed
    expect with a state diff.  The transcript is the instance's event log."""
    result = ScenarioResult()
    instance_id = instance_id or f"{model.id}-run"

    def on_event(inst: CaseInstance, event) -> None:
        doc = event.to_dict()
        result.transcript.append(event_line(doc))
        if store is not None:
            store.append_event(inst.instance_id, doc)

    if runtime is None:
        runtime = Runtime()
    runtime._on_event = _chain(runtime._on_event, on_event)
    if store is not None:
        runtime._on_instance_created = _chain(
            runtime._on_instance_created, lambda inst: store.create_instance_dir(inst))

    inst = runtime.create_instance(model, instance_id)
    last_snapshot = 0
    for step in steps:
        _run_step(runtime, inst, step)
        result.steps_run += 1
        if (store is not None and snapshot_every is not None
                and inst.event_seq - last_snapshot >= snapshot_every):
            store.save_snapshot(inst)
            last_snapshot = inst.event_seq
    return result


def _chain(first, second):
    if first is None:
        return second
    def chained(*args):
        first(*args)
        second(*args)
    return chained


def _run_step(runtime: Runtime, inst: CaseInstance, step: Step) -> None:
    args, line = step.args, step.line
    if step.directive == "worker":
        if len(args) != 2:
            raise ScenarioSyntaxError("worker needs: <id> <role,role,...>", line)
        runtime.register_worker(args[0], set(args[1].split(",")))
    elif step.directive == "casefile":
        if len(args) < 3:
            raise ScenarioSyntaxError("casefile needs: <actor> <op> <path> [json]", line)
        runtime.case_file_op(inst, args[0], args[1], args[2], _parse_payload(args, 3, line))
    elif step.directive == "action":
        if len(args) < 3:
            raise ScenarioSyntaxError("action needs: <actor> <target> <action> [json]", line)
        runtime.worker_action(inst, args[0], args[1], args[2], _parse_payload(args, 3, line))
    elif step.directive == "plan":
        if len(args) != 3:
            raise ScenarioSyntaxError("plan needs: <actor> <scope> <entry>", line)
        runtime.plan(inst, args[0], args[1], args[2])
    elif step.directive == "clock":
        if len(args) != 1:
            raise ScenarioSyntaxError("clock needs: <ticks>", line)
        runtime.advance_clock(inst, int(args[0]))
    elif step.directive == "expect":
        _check_expect(inst, args, line)


def _state_table(inst: CaseInstance) -> str:
    lines = [f"  case: {inst.case_state.value} (clock {inst.logical_clock})"]
    for item in inst.items.values():
        lines.append(f"  {item.id}: {item.state.value}")
    return "\n".join(lines)


def _check_expect(inst: CaseInstance, args: list[str], line: int) -> None:
    def fail(message: str) -> None:
        raise ExpectFailure(message, line, "actual state:\n" + _state_table(inst))

    if not args:
        raise ScenarioSyntaxError("empty expect", line)
    subject = args[0]
    if subject == "case":
        if len(args) != 2:
            raise ScenarioSyntaxError("expect case <state>", line)
        if inst.case_state.value != args[1]:
            fail(f"expected case {args[1]}, found {inst.case_state.value}")
    elif subject == "item":
        if len(args) != 3:
            raise ScenarioSyntaxError("expect item <id> <state>", line)
        target = args[1]
        if "#" not in target:
            target = f"{target}#0"
        item = inst.items.get(target)
        if item is None:
            fail(f"no item instance {target}")
        elif item.state.value != args[2]:
            fail(f"expected {target} {args[2]}, found {item.state.value}")
    elif subject == "milestone":
        if len(args) < 3:
            raise ScenarioSyntaxError("expect milestone <id> occurred|occurrences <n>", line)
        def_id = args[1]
        d = inst.index.items.get(def_id)
        if d is None or d.kind is not ItemKind.MILESTONE:
            fail(f"{def_id!r} is not a milestone")
        occurrences = sum(
            1 for i in inst.items.values()
            if i.definition_id == def_id and i.state is S.OCCURRED
        )
        if args[2] == "occurred":
            if occurrences == 0:
                fail(f"milestone {def_id} has not occurred")
        elif args[2] == "occurrences":
            want = int(args[3])
            if occurrences != want:
                fail(f"expected {want} occurrences of {def_id}, found {occurrences}")
        else:
            raise ScenarioSyntaxError(f"unknown milestone assertion {args[2]!r}", line)
    elif subject == "casefile":
        if len(args) != 3 or args[2] not in ("exists", "absent"):
            raise ScenarioSyntaxError("expect casefile <path> exists|absent", line)
        present = inst.exists(args[1])
        if args[2] == "exists" and not present:
            fail(f"case file item {args[1]} does not exist")
        if args[2] == "absent" and present:
            fail(f"case file item {args[1]} exists")
    else:
        raise ScenarioSyntaxError(f"unknown expect subject {subject!r}", line)

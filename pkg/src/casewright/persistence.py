"""Durable storage of models, event logs, and snapshots, plus log replay.

Layout (one directory per instance, everything human-inspectable):

    <root>/models/<model id>.json
    <root>/instances/<instance id>/model.json
    <root>/instances/<instance id>/log.jsonl      # one event per line
    <root>/instances/<instance id>/snapshots/<seq>.json

Restore loads the latest snapshot (if any) and replays the remaining log
through the engine: externally-initiated entries (worker actions, case file
operations, claims, planning, clock advances, sub-case notifications) are
re-invoked, engine-derived events are re-derived by the resulting cascades.
Every event the replay emits is compared against the stored line; any
divergence, gap, or illegal transition raises CorruptLog.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from .engine import (
    ADVANCE_MARKER,
    CASE_TARGET,
    CLAIM_MARKER,
    ENGINE_ACTOR,
    PLAN_MARKER,
    SUBCASE_PREFIX,
    CaseInstance,
    Runtime,
    StandardEvent,
)
from .errors import CasewrightError, CorruptLog, SequenceGap, UnknownTarget
from .lifecycle import CASE_FILE_EVENTS
from .model import CaseModel, parse_model, serialize_model

logger = logging.getLogger(__name__)


def event_line(event_doc: dict) -> str:
    """Stable log-line encoding: key order seq, source, name, actor, tick[, payload]."""
    ordered = {k: event_doc[k] for k in ("seq", "source", "name", "actor", "tick")}
    if "payload" in event_doc and event_doc["payload"] is not None:
        ordered["payload"] = event_doc["payload"]
    return json.dumps(ordered, ensure_ascii=True)


def canonical_snapshot(instance: CaseInstance) -> bytes:
    """Byte-stable encoding used by the determinism checks."""
    return json.dumps(instance.to_snapshot(), sort_keys=True,
                      separators=(",", ":"), ensure_ascii=True).encode()


class Store:
    """File-backed store; appends are durable (fsync) before they ack."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "models").mkdir(parents=True, exist_ok=True)
        (self.root / "instances").mkdir(parents=True, exist_ok=True)
        self._last_seq: dict[str, int] = {}

    # -- models ---------------------------------------------------------------

    def save_model(self, model: CaseModel) -> None:
        path = self.root / "models" / f"{model.id}.json"
        path.write_text(serialize_model(model))

    def load_model(self, model_id: str) -> CaseModel:
        path = self.root / "models" / f"{model_id}.json"
        if not path.exists():
            raise UnknownTarget(f"unknown model {model_id!r}")
        return parse_model(path.read_text())

    def has_model(self, model_id: str) -> bool:
        return (self.root / "models" / f"{model_id}.json").exists()

    def list_models(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "models").glob("*.json"))

    def resolver(self):
        def resolve(model_id: str) -> CaseModel | None:
            return self.load_model(model_id) if self.has_model(model_id) else None
        return resolve

    # -- instances --------------------------------------------------------------

    def _instance_dir(self, instance_id: str) -> Path:
        return self.root / "instances" / instance_id

    def create_instance_dir(self, instance: CaseInstance) -> None:
        directory = self._instance_dir(instance.instance_id)
        (directory / "snapshots").mkdir(parents=True, exist_ok=True)
        (directory / "model.json").write_text(serialize_model(instance.model))
        (directory / "log.jsonl").touch()
        self._last_seq[instance.instance_id] = 0

    def has_instance(self, instance_id: str) -> bool:
        return self._instance_dir(instance_id).exists()

    def list_instances(self) -> list[str]:
        return sorted(p.name for p in (self.root / "instances").iterdir() if p.is_dir())

    def instance_model(self, instance_id: str) -> CaseModel:
        path = self._instance_dir(instance_id) / "model.json"
        if not path.exists():
            raise UnknownTarget(f"unknown instance {instance_id!r}")
        return parse_model(path.read_text())

    # -- event log ----------------------------------------------------------------

    def last_seq(self, instance_id: str) -> int:
        if instance_id not in self._last_seq:
            log = self.read_log(instance_id)
            self._last_seq[instance_id] = log[-1]["seq"] if log else 0
        return self._last_seq[instance_id]

    def append_event(self, instance_id: str, event_doc: dict) -> int:
        """Append one event; the sequence must be exactly last + 1."""
        expected = self.last_seq(instance_id) + 1
        if event_doc["seq"] != expected:
            raise SequenceGap(expected, event_doc["seq"])
        path = self._instance_dir(instance_id) / "log.jsonl"
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(event_line(event_doc) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._last_seq[instance_id] = event_doc["seq"]
        return event_doc["seq"]

    def read_log(self, instance_id: str, after: int = 0) -> list[dict]:
        path = self._instance_dir(instance_id) / "log.jsonl"
        if not path.exists():
            raise UnknownTarget(f"unknown instance {instance_id!r}")
        out = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                if doc["seq"] > after:
                    out.append(doc)
        return out

    # -- snapshots --------------------------------------------------------------------

    def save_snapshot(self, instance: CaseInstance) -> int:
        seq = instance.event_seq
        path = self._instance_dir(instance.instance_id) / "snapshots" / f"{seq:012d}.json"
        path.write_text(json.dumps(instance.to_snapshot(), sort_keys=True, indent=2) + "\n")
        return seq

    def latest_snapshot(self, instance_id: str) -> tuple[int, dict] | None:
        directory = self._instance_dir(instance_id) / "snapshots"
        if not directory.exists():
            return None
        candidates = sorted(directory.glob("*.json"))
        if not candidates:
            return None
        path = candidates[-1]
        return int(path.stem), json.loads(path.read_text())


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def _is_stimulus(doc: dict) -> bool:
    """Entries restore re-invokes; everything actor=engine is re-derived."""
    return doc["actor"] != ENGINE_ACTOR


class _ReplayCursor:
    """Checks every event the replaying engine emits against the stored log."""

    def __init__(self, expected: list[dict], start: int = 0):
        self.expected = expected
        self.pos = start

    def on_event(self, _inst: CaseInstance, event: StandardEvent) -> None:
        if self.pos >= len(self.expected):
            raise CorruptLog(f"replay produced unexpected event #{event.seq} {event.name}")
        want = self.expected[self.pos]
        got = event.to_dict()
        if event_line(got) != event_line(want):
            raise CorruptLog(
                f"replay diverged at seq {want['seq']}: stored {event_line(want)}, replayed {event_line(got)}"
            )
        self.pos += 1


def _invoke_stimulus(runtime: Runtime, inst: CaseInstance, doc: dict) -> None:
    name, source, actor, payload = doc["name"], doc["source"], doc["actor"], doc.get("payload")
    if name == ADVANCE_MARKER:
        runtime.advance_clock(inst, payload["ticks"])
    elif name == PLAN_MARKER:
        runtime.plan(inst, actor, scope=source, entry=payload["entry"])
    elif name == CLAIM_MARKER:
        runtime.worker_action(inst, actor, target=source, action=CLAIM_MARKER)
    elif name in CASE_FILE_EVENTS and source not in inst.items and source != CASE_TARGET:
        if name in ("addChild", "removeChild"):
            runtime.case_file_op(inst, actor, name, payload["path"], payload.get("value"))
        else:
            runtime.case_file_op(inst, actor, name, source, payload)
    else:
        runtime.worker_action(inst, actor, target=source, action=name, payload=payload)


def restore(store: Store, instance_id: str, runtime: Runtime | None = None) -> CaseInstance:
    """Rebuild an instance: latest snapshot, then replay of the remaining log.

    The result is state-identical to the live instance at its last
    acknowledged event; restoring twice yields identical snapshots.
    """
    model = store.instance_model(instance_id)
    log = store.read_log(instance_id)
    for i, doc in enumerate(log):
        if doc["seq"] != i + 1:
            raise CorruptLog(f"log sequence gap at position {i}: seq {doc['seq']}")

    snapshot = store.latest_snapshot(instance_id)
    cursor = _ReplayCursor(log)
    replay_runtime = runtime or Runtime(model_resolver=store.resolver(), replay=True)
    if not replay_runtime.replay:
        raise ValueError("restore requires a replay-mode runtime")
    replay_runtime._on_event = cursor.on_event

    try:
        if snapshot is not None:
            seq, doc = snapshot
            inst = CaseInstance.from_snapshot(model, doc)
            replay_runtime.adopt(inst)
            cursor.pos = seq
            if seq > len(log):
                raise CorruptLog(f"snapshot at seq {seq} but log ends at {len(log)}")
        elif not log:
            # nothing recorded yet: restore is simply a fresh instantiation
            replay_runtime._on_event = None
            return replay_runtime.create_instance(model, instance_id)
        else:
            inst = replay_runtime.create_instance(model, instance_id)
        while cursor.pos < len(log):
            doc = log[cursor.pos]
            if not _is_stimulus(doc):
                raise CorruptLog(
                    f"engine event at seq {doc['seq']} ({doc['name']}) was not re-derived"
                )
            _invoke_stimulus(replay_runtime, inst, doc)
    except CorruptLog:
        raise
    except CasewrightError as exc:
        raise CorruptLog(f"replay failed at seq {log[cursor.pos]['seq'] if cursor.pos < len(log) else '?'}: {exc}") from exc

    inst.history = [StandardEvent.from_dict(doc) for doc in log]
    return inst

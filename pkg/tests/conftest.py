"""Shared fixtures: the complaints model, runtimes, stores."""

from __future__ import annotations

from pathlib import Path

import pytest

from casewright.engine import Runtime
from casewright.model import CaseModel, parse_model
from casewright.persistence import Store

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SCENARIOS = FIXTURES / "scenarios"


@pytest.fixture(scope="session")
def complaints_text() -> str:
    return (FIXTURES / "complaints.json").read_text()


@pytest.fixture(scope="session")
def complaints_model(complaints_text) -> CaseModel:
    return parse_model(complaints_text)


@pytest.fixture(scope="session")
def reversal_model() -> CaseModel:
    return parse_model((FIXTURES / "payment-reversal.json").read_text())


@pytest.fixture
def runtime(reversal_model) -> Runtime:
    rt = Runtime()
    rt.register_model(reversal_model)
    for worker, roles in (
        ("ana", {"owner"}),
        ("pia", {"specialist"}),
        ("sup", {"supervisor"}),
        ("mia", {"manager"}),
        ("ivo", {"investigator"}),
    ):
        rt.register_worker(worker, roles)
    return rt


@pytest.fixture
def store(tmp_path) -> Store:
    return Store(tmp_path / "store")


def persisted_runtime(store: Store, *models) -> Runtime:
    """A runtime wired to a store exactly like the service wires it."""
    for model in models:
        store.save_model(model)
    rt = Runtime(
        model_resolver=store.resolver(),
        on_event=lambda inst, ev: store.append_event(inst.instance_id, ev.to_dict()),
        on_instance_created=lambda inst: store.create_instance_dir(inst),
    )
    for worker, roles in (
        ("ana", {"owner"}),
        ("pia", {"specialist"}),
        ("sup", {"supervisor"}),
        ("mia", {"manager"}),
        ("ivo", {"investigator"}),
    ):
        rt.register_worker(worker, roles)
    return rt

"""casewright: a declarative case-management engine.

Case models are parsed from a native JSON format, validated against the
decorator applicability rules, and executed by an event-driven runtime that
reacts to case file changes, plan-item lifecycle events, and case worker
actions.
"""

from .engine import CaseInstance, Runtime
from .errors import CasewrightError
from .model import CaseModel, parse_model, serialize_model, validate_model

__all__ = [
    "CaseInstance",
    "CaseModel",
    "CasewrightError",
    "Runtime",
    "parse_model",
    "serialize_model",
    "validate_model",
]

__version__ = "0.1.0"

"""Exception hierarchy shared by all casewright modules."""

from __future__ import annotations


class CasewrightError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# Model parsing / validation
# ---------------------------------------------------------------------------


class ModelSyntaxError(CasewrightError):
    """Model document is not well-formed; carries a position or JSON pointer."""

    def __init__(self, message: str, position: str | None = None):
        self.position = position
        super().__init__(f"{message} (at {position})" if position else message)


class DuplicateId(CasewrightError):
    def __init__(self, element_id: str):
        self.element_id = element_id
        super().__init__(f"duplicate id: {element_id!r}")


class UnresolvedReference(CasewrightError):
    def __init__(self, ref: str, where: str):
        self.ref = ref
        self.where = where
        super().__init__(f"unresolved reference {ref!r} in {where}")


class InvalidModel(CasewrightError):
    """Model failed validation with error-severity diagnostics."""


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class ExpressionError(CasewrightError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (column {position})")


class ExpressionTypeError(ExpressionError):
    pass


class EvaluationError(ExpressionError):
    """Missing reference or runtime type mismatch during evaluation."""


# ---------------------------------------------------------------------------
# Lifecycle / engine
# ---------------------------------------------------------------------------


class IllegalTransition(CasewrightError):
    def __init__(self, kind: str, state: object, event: str):
        self.kind = str(kind)
        self.state = state
        self.event = event
        super().__init__(f"no {event!r} transition for {self.kind} in state {state}")


class CascadeLimitExceeded(CasewrightError):
    """Dispatch cascade did not reach quiescence; the model is likely cyclic."""


class PermissionDenied(CasewrightError):
    pass


class NotClaimed(CasewrightError):
    pass


class RequiredIncomplete(CasewrightError):
    """Manual completion refused: required or still-running work remains."""

    def __init__(self, blockers: list[str]):
        self.blockers = blockers
        super().__init__("scope not completable: " + "; ".join(blockers))


class UnknownTarget(CasewrightError):
    """Instance, item, model, or view id does not exist."""


class NoSuchPath(CasewrightError):
    pass


class NotAContainer(CasewrightError):
    pass


class NotInScope(CasewrightError):
    pass


class ScopeNotActive(CasewrightError):
    pass


class AlreadyPlanned(CasewrightError):
    """Non-repeating discretionary entry already planned in this scope."""


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


class SequenceGap(CasewrightError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"event sequence gap: expected {expected}, got {got}")


class CorruptLog(CasewrightError):
    """Replay diverged from the stored log or hit an illegal transition."""

"""Exception hierarchy shared across the package.

Every error carries a stable ``code`` token so the HTTP layer and the CLI
can map failures without string-matching messages.
"""


class ModelMateError(Exception):
    """Base class for all package errors."""

    code = "error"


# --- model state ---------------------------------------------------------


class ModelError(ModelMateError):
    """Base for domain-model state violations."""

    code = "model-error"


class DuplicateName(ModelError):
    """A class with this name already exists."""

    code = "duplicate-name"


class DuplicateAttribute(ModelError):
    """The class already owns an attribute with this name."""

    code = "duplicate-attribute"


class DuplicatePair(ModelError):
    """An association between these two classes already exists."""

    code = "duplicate-pair"


class UnknownClass(ModelError):
    """Referenced class is not on the canvas."""

    code = "unknown-class"


class UnknownElement(ModelError):
    """Referenced attribute or association does not exist."""

    code = "unknown-element"


class SelfLoopForbidden(ModelError):
    """Associations must connect two distinct classes."""

    code = "self-loop"


class UnknownCandidate(ModelError):
    """No candidate with that id is in the store."""

    code = "unknown-candidate"


class AlreadyInModel(ModelError):
    """Candidate payload duplicates an element already on the canvas."""

    code = "already-in-model"


class EmptyModel(ModelError):
    """Suggestion generation needs at least one class on the canvas."""

    code = "empty-model"


# --- text formats --------------------------------------------------------


class ParseError(ModelMateError):
    """Model-text input could not be parsed; carries line/column."""

    code = "parse-error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        base = super().__str__()
        if self.line:
            return f"line {self.line}, col {self.column}: {base}"
        return base


class MalformedRow(ModelMateError):
    """A session-log row could not be interpreted."""

    code = "malformed-row"


# --- completion responses -------------------------------------------------


class ResponseRejected(ModelMateError):
    """Completion text held no usable token after normalization."""

    code = "response-rejected"


class UnknownKind(ModelMateError):
    """Relation-kind answer was outside the known vocabulary."""

    code = "unknown-kind"


class NotInPair(ModelMateError):
    """Direction answer named neither class of the queried pair."""

    code = "not-in-pair"


# --- provider gateway -----------------------------------------------------


class ProviderError(ModelMateError):
    """Completion provider failed after exhausting retries."""

    code = "provider-error"


class ProviderTimeout(ProviderError):
    """Provider did not answer within the configured timeout."""

    code = "provider-timeout"


class AuthError(ProviderError):
    """Provider rejected the credentials; never retried."""

    code = "auth-error"


class MockMiss(ModelMateError):
    """Mock provider has no scripted response for this prompt."""

    code = "mock-miss"


class ConfigError(ModelMateError):
    """Invalid or missing configuration value."""

    code = "config-error"


# --- sessions -------------------------------------------------------------


class SessionError(ModelMateError):
    code = "session-error"


class UnknownSession(SessionError):
    """No session with that id."""

    code = "unknown-session"


class WrongMode(SessionError):
    """Operation is not available in the session's current mode."""

    code = "wrong-mode"


class SessionEnded(SessionError):
    """Session already recorded task-end; no further operations."""

    code = "session-ended"


# --- metrics --------------------------------------------------------------


class MetricsError(ModelMateError):
    code = "metrics-error"


class EmptySet(MetricsError):
    """Overlap is undefined when either element set is empty."""

    code = "empty-set"


class DegenerateInput(MetricsError):
    """Statistic needs at least two non-empty groups."""

    code = "degenerate-input"


class MissingMarkers(MetricsError):
    """Log lacks the task-start/task-end rows needed for timing."""

    code = "missing-markers"


class InconsistentLog(MetricsError):
    """Accept operations disagree with the model states in the log."""

    code = "inconsistent-log"

"""Exception types shared across the dpage engine."""

from __future__ import annotations


class DpageError(Exception):
    """Base class for all dpage errors."""


class PageFormatError(DpageError):
    """Raised when a page document is malformed (bad JSON, schema, base64)."""


class PageValidationError(DpageError):
    """Raised when a page document violates structural invariants.

    Carries the full validation report so callers can show every finding.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.errors))


class UnknownCellError(DpageError):
    """Raised when an operation names a cell id that does not resolve."""


class CycleError(DpageError):
    """Raised when a structural edit would break the tree invariant."""


class DiffConflictError(DpageError):
    """Raised when a diff's keep/del context disagrees with its base file."""

    def __init__(self, file: str, position: int, message: str):
        self.file = file
        self.position = position
        super().__init__(f"{file}, line {position}: {message}")


class DirectiveError(DpageError):
    """Raised when a directive block cannot be parsed into its spec."""


class NavigationError(DpageError):
    """Raised on illegal reader-session transitions."""


class RunnerDisabledError(DpageError):
    """Raised when code execution is requested but not enabled."""


class UnsupportedLanguageError(DpageError):
    """Raised when no runner is configured for a code question's language."""


class RunnerLaunchError(DpageError):
    """Raised when the configured external command cannot be started."""


class LlmError(DpageError):
    """Raised on chat-endpoint failures (transport, status, malformed body).

    ``retryable`` hints whether the same request may be retried as-is.
    """

    def __init__(self, message: str, retryable: bool = True):
        self.retryable = retryable
        super().__init__(message)


class StateCorruptError(DpageError):
    """Raised when a stored user-state file cannot be decoded.

    The corrupt file is preserved under ``recovery_path`` before raising.
    """

    def __init__(self, path, recovery_path):
        self.path = path
        self.recovery_path = recovery_path
        super().__init__(f"corrupt state file {path} (preserved as {recovery_path})")

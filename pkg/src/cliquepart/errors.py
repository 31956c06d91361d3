"""Exception hierarchy shared across the package."""


class CliquePartError(Exception):
    """Base class for all package-specific errors."""


class InputError(CliquePartError):
    """Invalid user-supplied data (files, matrices, CLI arguments)."""


class GraphFormatError(InputError):
    """Malformed graph file. Carries the offending 1-based line when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateEdgeError(GraphFormatError):
    pass


class OracleSizeError(InputError):
    """Brute-force enumeration refused because the instance is too large."""


class InternalInconsistencyError(CliquePartError):
    """A solver invariant was violated; indicates a bug, not bad input."""

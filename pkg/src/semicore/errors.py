"""Exception hierarchy used across the package."""


class GraphError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class InputError(GraphError):
    """Malformed edge-list or ops input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StorageError(GraphError):
    """Graph files that cannot be read back or written."""


class NodeRangeError(GraphError, IndexError):
    pass


class SelfLoopError(GraphError, ValueError):
    pass


class DuplicateEdgeError(GraphError, ValueError):
    pass


class MissingEdgeError(GraphError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class StreamError(GraphError):
    """An op inside an update stream failed; earlier ops stay applied."""

    def __init__(self, index, cause):
        super().__init__(f"op {index}: {cause}")
        self.index = index
        self.cause = cause

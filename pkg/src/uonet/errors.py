"""Exception hierarchy shared across the package."""


class UonetError(Exception):
    """Base class for all package errors."""


class NodeNotFoundError(UonetError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UndefinedMetricError(UonetError, ValueError):
    """A statistic is undefined for the given graph (e.g. density of an empty side)."""


class EmptyGraphError(UonetError, ValueError):
    pass


class ParseError(UonetError, ValueError):
    """Malformed input record. ``line`` is 1-based."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class InvalidPartitionError(UonetError, ValueError):
    pass


class DegenerateFitError(UonetError, ValueError):
    pass


class ConvergenceError(UonetError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InvalidComparisonError(UonetError, ValueError):
    pass

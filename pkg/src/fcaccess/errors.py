"""Exception hierarchy shared by every module."""


class AccessError(Exception):
    """Base class for all fcaccess errors."""


class ContractError(AccessError, ValueError):
    """A precondition on an argument was violated."""


class SchemaError(AccessError):
    """A required field or column is missing from an input document."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ValidationError(AccessError):
    """One or more records break a domain invariant.

    ``problems`` holds one human readable line per offending record.
    """

    def __init__(self, message, problems=()):
        self.problems = list(problems)
        if self.problems:
            message = message + ":\n  " + "\n  ".join(self.problems)
        super().__init__(message)


class GeometryError(AccessError):
    """Invalid or degenerate geometry."""


class SnapError(AccessError):
    """No network node lies within the snapping tolerance."""

    def __init__(self, message, distance):
        super().__init__(message)
        self.distance = distance

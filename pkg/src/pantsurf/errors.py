"""Exception types shared across the package."""


class GeometryError(ValueError):
    """A hyperbolic construction failed numerically (e.g. arccosh of a value below 1)."""


class ResourceError(RuntimeError):
    """A configured size budget was exceeded.

    ``best`` carries whatever partial answer was available when the budget
    ran out (a distance bound, a partial snapshot, ...), or ``None``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ParseError(ValueError):
    """A serialized record could not be decoded."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field

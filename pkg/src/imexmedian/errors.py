"""Exception hierarchy for the package."""


class ImexMedianError(Exception):
    """Base class for every error raised by this package."""


class GraphError(ImexMedianError, ValueError):
    """Invalid communication graph."""


class DisconnectedGraph(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NonPositiveWeight(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class EmptyObservations(ImexMedianError, ValueError):
    pass


class NonFiniteInput(ImexMedianError, ValueError):
    pass


class DimensionMismatch(ImexMedianError, ValueError):
    pass


class NotSymmetric(ImexMedianError, ValueError):
    pass


class NoConvergence(ImexMedianError, RuntimeError):
    pass


class BoundViolated(ImexMedianError, AssertionError):
    """The geometric decay bound failed; indicates an implementation bug."""


class TrajectoryTooShort(ImexMedianError, ValueError):
    pass


class ParseError(ImexMedianError, ValueError):
    """Malformed scenario text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ImexMedianError, ValueError):
    """Well-formed scenario with an invalid field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

"""Exception types raised by the inference engine and its helpers."""


class InferenceError(Exception):
    """Base class for every error raised by this package."""


class UnknownVariableError(InferenceError, KeyError):
    """A variable (or factor) id is not part of the graph."""

    def __str__(self):
        return Exception.__str__(self)


class ScopeError(InferenceError, ValueError):
    """A table scope is malformed or does not match what an operation needs."""


class DomainMismatchError(ScopeError):
    """A shared variable has different domain sizes in two tables."""


class GraphStructureError(InferenceError, ValueError):
    """The factor graph or its spanning forest violates a structural rule."""


class TreeCycleError(GraphStructureError):
    """A proposed set of tree edges contains a cycle."""


class CutViolationError(GraphStructureError):
    """A tree edge cannot be removed because non-tree edges cross its cut."""


class FormatError(InferenceError, ValueError):
    """A graph or script file could not be parsed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno

"""Exception hierarchy shared by every module."""


class OrrError(Exception):
    """Base class for all package errors."""


class ArgumentError(OrrError, ValueError):
    """A caller passed an argument outside the operation's domain."""


class ParseError(OrrError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ValidationError(OrrError):
    """A table, witness or certificate failed an invariant check."""


class PreconditionError(OrrError, ValueError):
    """A construction was called outside its hypotheses."""


class ResourceError(OrrError):
    """A size or work limit was exceeded."""


class SearchTimeout(ResourceError):
    def __init__(self, message, nodes_explored=0):
        self.nodes_explored = nodes_explored
        super().__init__(f"{message} after {nodes_explored} search nodes")


class NotFoundError(OrrError):
    """An enumeration was exhausted without producing an instance."""

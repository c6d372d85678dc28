"""Exception hierarchy shared across the toolkit."""


class WrebecaError(Exception):
    """Base class for all toolkit errors."""


class ParseError(WrebecaError):
    """Syntax error with a source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ModelRuntimeError(WrebecaError):
    """Runtime error raised while executing a message server.

    Carries the offending rebec and, when known, the source location of
    the statement or expression that failed.
    """

    def __init__(self, message, rebec=None, line=None, col=None):
        where = ""
        if rebec is not None:
            where += f"rebec {rebec}: "
        if line is not None:
            where += f"{line}:{col or 0}: "
        super().__init__(where + message)
        self.message = message
        self.rebec = rebec
        self.line = line
        self.col = col


class StepBudgetExceeded(ModelRuntimeError):
    """A message-server body ran past the interpreter step budget."""


class ExplorationLimitExceeded(WrebecaError):
    """State or transition limit hit; carries the partial statistics."""

    def __init__(self, message, stats):
        super().__init__(message)
        self.stats = stats


class StaticTopologyRequired(WrebecaError):
    """Counter abstraction was requested for a mobile network.

    Aggregating nodes by neighborhood is sound only when the constraint
    admits a single topology; with mobility the reduced system is not
    strongly bisimilar to the original one (nodes equivalent under one
    topology need not be equivalent after a move).
    """

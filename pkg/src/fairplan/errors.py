"""Exception types shared across the toolkit."""


class FairplanError(Exception):
    """Base class for all errors raised by this package."""


class PDDLSyntaxError(FairplanError):
    """Malformed PDDL input; carries the source position when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class PDDLSemanticError(FairplanError):
    """Well-formed s-expressions with inconsistent meaning (types, arities, ...)."""


class PlanSyntaxError(FairplanError):
    """A plan file line does not resolve to a ground action of the task."""


class InvalidPlan(FairplanError):
    """Plan execution failed; records the first failing step."""

    def __init__(self, message, step=None, missing=()):
        self.step = step
        self.missing = tuple(missing)
        super().__init__(message)


class UnassignableGoal(FairplanError):
    """A goal that no agent can achieve under the delete relaxation."""

    def __init__(self, goal):
        self.goal = goal
        super().__init__(f"no agent can achieve goal {goal}")


class CompilationError(FairplanError):
    """A task transformation cannot be applied to the given input."""


class SearchBoundExceeded(FairplanError):
    """Exhaustive search hit its configured state or node bound."""

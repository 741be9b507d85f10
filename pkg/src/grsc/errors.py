"""Exception types shared across the toolkit."""


class GrscError(Exception):
    """Base class; the CLI maps every subclass to exit code 3."""

    cause = "error"

    def to_dict(self) -> dict:
        return {"cause": self.cause, "message": str(self)}


class InputError(GrscError):
    cause = "input"


class GraphFormatError(InputError):
    cause = "graph-format"


class WordFormatError(InputError):
    cause = "word-format"


class NotReducedLabelling(GrscError):
    cause = "not-reduced-labelling"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"labelling is not reduced at {self.violations[:5]}")


class NotReducedWord(GrscError):
    cause = "not-reduced-word"


class BudgetExceeded(GrscError):
    cause = "budget"

    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(f"{what} exceeded budget {budget}")


class PreconditionFailed(GrscError):
    cause = "precondition"


class UndefinedDistance(GrscError):
    cause = "undefined-distance"

    def __init__(self, edge: int):
        self.edge = edge
        super().__init__(f"edge {edge} is not a piece; piece distance undefined")


class LemmaViolation(GrscError):
    cause = "lemma-violation"

    def __init__(self, message: str, **data):
        self.data = data
        super().__init__(message)


class DiagramError(GrscError):
    cause = "diagram"


class NotPlanar(DiagramError):
    cause = "not-planar"


class NotSimplyConnected(DiagramError):
    cause = "not-simply-connected"


class NoLift(DiagramError):
    cause = "no-lift"


class AmbiguousLift(DiagramError):
    cause = "ambiguous-lift"


class ReplayFailed(GrscError):
    cause = "replay-failed"


class BallTooSmall(GrscError):
    cause = "ball-too-small"


class InsufficientData(GrscError):
    cause = "insufficient-data"

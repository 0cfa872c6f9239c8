"""Exception hierarchy shared by all solver modules.

The CLI maps these onto its exit-code contract: argument/shape/precondition
failures exit 2, numeric failures exit 3, the guarded trivial intervention
case exits 4.
"""


class GraphonGamesError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(GraphonGamesError, ValueError):
    """Invalid argument values (bad parameters, out-of-range inputs)."""


class ShapeError(ArgumentError):
    """Mismatched dimensions between processes, profiles, or matrices."""


class PreconditionError(GraphonGamesError):
    """A mathematical precondition (contraction, spectral radius) fails."""


class CapabilityError(PreconditionError):
    """The exact algorithm cannot handle an instance of this size."""


class NumericError(GraphonGamesError):
    """An iterative routine failed to converge.

    Carries the last residual so callers can report how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TrivialInterventionError(GraphonGamesError):
    """Guarded trivial planner case: w < 0 with budget covering ‖θ‖².

    In this regime the planner would simply cancel the status quo
    (intervention = −θ); the solvers refuse to run and report it instead.
    """

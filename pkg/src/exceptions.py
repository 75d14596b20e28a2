"""
Domain exceptions shared by every feature package.

Routers translate these into ``HTTPException`` responses and the CLI maps them
onto exit codes.
"""


class ToolkitError(Exception):
    """Base class for all errors raised by the toolkit."""


class ParseError(ToolkitError):
    """
    Raised when DSL text does not conform to the grammar.

    Args:
        message (str): Human readable description.
        offset (int): Byte offset of the offending token in the input text.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """Raised when an identifier is not declared by the frame."""


class FrameError(ToolkitError):
    """Raised for inconsistent coordinate frames or frame declarations."""


class EvaluationError(ToolkitError):
    """Raised when an expression hits a pole or branch cut during evaluation."""


class UnsamplableError(ToolkitError):
    """Raised when every re-draw of a zero-test sample hits a pole or branch cut."""


class NotEvolutionaryError(ToolkitError):
    """Raised when an operation needs a solve form the system does not declare."""


class FixtureNotFoundError(ToolkitError):
    """Raised for an unknown fixture id or row name."""


class SimulationError(ToolkitError):
    """
    Raised when a simulation blows up.

    Args:
        message (str): Description of the failure.
        time (float): Simulation time at which the failure was detected.
    """

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


class SingularityError(SimulationError):
    """Raised when a singular closure leaves its regular region (|u_x| too small)."""


class ConfigurationError(ToolkitError):
    """Raised for run configurations the solver cannot honour (bad refinement levels, foreign symbols)."""

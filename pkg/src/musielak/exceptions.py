"""Exception types shared across the package."""


class MusielakError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(MusielakError):
    """A structural parameter is out of its admissible range."""


class DomainError(MusielakError):
    """A geometric precondition on domains or supports is violated."""


class ResolutionError(MusielakError):
    """The grid is too coarse for the requested operation."""


class AlignmentError(MusielakError):
    """A shift or parameter is not aligned with the grid spacing."""


class SamplingError(MusielakError):
    """A callable produced non-finite values during sampling."""


class ConfigError(MusielakError):
    """A configuration document is malformed or inconsistent."""


class BudgetInfeasibleError(MusielakError):
    """An approximation stage exhausted its parameter ladder.

    Attributes
    ----------
    stage : str
        Name of the failing stage: "translate", "cutoff" or "mollify".
    details : dict
        Ladder of attempted parameters and the errors they produced.
    """

    def __init__(self, stage, message, details=None):
        super().__init__(message)
        self.stage = stage
        self.details = details if details is not None else {}

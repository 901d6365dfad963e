"""Exception types raised across the package."""


class WaveDensError(Exception):
    """Base class for package errors."""


class InvalidShapeError(WaveDensError, ValueError):
    pass


class UnsupportedError(WaveDensError, NotImplementedError):
    """Requested feature exists in the API but has no implementation."""


class DegenerateSplitError(WaveDensError, ValueError):
    pass


class InadmissibleEtaError(WaveDensError, ValueError):
    """Dependence parameter outside the interval where I - eta*H is invertible."""

    def __init__(self, eta, interval):
        self.eta = eta
        self.interval = interval
        lo, hi = interval
        super().__init__(f"eta={eta!r} outside admissible interval ({lo:.6f}, {hi:.6f})")


class HypothesisError(WaveDensError, ValueError):
    """Parameters violate a hypothesis the rate formulas rely on."""


class DegenerateEstimateError(WaveDensError, ArithmeticError):
    pass


class SampleParseError(WaveDensError, ValueError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)

"""Exception hierarchy.

Every error raised by the library derives from :class:`WvarentError`, so the
CLI can map them all to exit code 1 and report the class name.
"""


class WvarentError(Exception):
    """Base class for all library errors."""


class DegenerateParameter(WvarentError, ValueError):
    pass


class OutOfSupport(WvarentError, ValueError):
    pass


class UnsupportedFamily(WvarentError, TypeError):
    pass


class TailUnderflow(WvarentError, ArithmeticError):
    """The conditioning event ``X > t`` has (numerically) zero probability."""


class NonConvergence(WvarentError, ArithmeticError):
    pass


class NonfiniteMoment(NonConvergence):
    pass


class NonFiniteIntegrand(WvarentError, ArithmeticError):
    pass


class InvalidModel(WvarentError, ValueError):
    pass


class DegenerateProbability(InvalidModel):
    pass


class EtaSingularity(WvarentError, ArithmeticError):
    pass


class BranchMismatch(WvarentError, ValueError):
    pass


class QuantileSingularity(WvarentError, ArithmeticError):
    pass


class InvalidStructure(WvarentError, ValueError):
    pass


class EmptySample(WvarentError, ValueError):
    pass


class NonPositiveBandwidth(WvarentError, ValueError):
    pass


class EmptyStudy(WvarentError, ValueError):
    pass


class ParseError(WvarentError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(WvarentError, ValueError):
    pass


class RatioSingularityWarning(RuntimeWarning):
    """phi(u) vanished on part of the grid used for a supremum."""

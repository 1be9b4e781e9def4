"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map a
failure to its documented status without a lookup table.
"""


class GribovError(Exception):
    exit_code = 1


class ConfigurationError(GribovError, ValueError):
    exit_code = 2


class InvalidTruncationError(ConfigurationError):
    pass


class ParameterError(ConfigurationError):
    pass


class UnsupportedParameterError(ParameterError):
    pass


class DimensionMismatchError(GribovError, ValueError):
    exit_code = 2


class LogarithmicCaseError(GribovError, ValueError):
    """Requested series branch needs logarithmic terms and has no power-series form."""

    exit_code = 2


class NumericalError(GribovError):
    exit_code = 3


class NoRootError(NumericalError):
    pass


class StiffnessError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class DomainTruncationError(NumericalError):
    pass


class InvariantViolation(GribovError):
    exit_code = 1


class DegenerateSignError(InvariantViolation):
    pass


class PerronViolationError(InvariantViolation):
    pass


class LowerBoundViolation(InvariantViolation):
    pass


class DivergenceError(InvariantViolation):
    pass

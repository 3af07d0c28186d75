"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 2,
empty or degenerate results exit 1.
"""


class LomaxMixError(Exception):
    """Base class for all package errors."""


class DomainError(LomaxMixError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(LomaxMixError, ValueError):
    """A parameter set violates its declared invariants."""


class InputFormatError(LomaxMixError):
    """An input file or model spec cannot be parsed at all."""


class DegenerateDataError(LomaxMixError):
    """A sample is empty or carries no usable variation."""


class FitError(LomaxMixError):
    """Optimization failed to produce any usable candidate."""


class InsufficientResolutionError(LomaxMixError):
    """Binned data cannot support the requested test (too few bins or dof <= 0)."""

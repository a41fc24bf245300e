"""Exception types shared across the library.

Separate classes are used so that callers (in particular the command-line
front end, which maps failure kinds to exit codes) can distinguish bad input
from numerical breakdown and from genuine nonexistence results.
"""


class RollgapError(Exception):
    """Base class for all library errors."""


class InvalidInputError(RollgapError):
    """Raised when an argument is malformed (non-finite entries, bad sizes)."""


class PreconditionError(RollgapError):
    """Raised when a documented precondition is violated by otherwise
    well-formed input, e.g. a block spectral radius outside the admissible
    interval."""


class NumericalError(RollgapError):
    """Raised when a dense solver or an ODE integrator fails to deliver a
    result at the requested accuracy."""


class NoRollWaveError(RollgapError):
    """Raised when no periodic wave with a single shock per period exists for
    the requested parameters (e.g. Froude number at or below 2)."""


class LopatinskyDegenerateError(RollgapError):
    """Raised when the shock boundary system is (numerically) singular, so
    outgoing modes cannot be solved from incoming ones."""


class HyperbolicityError(RollgapError):
    """Raised when characteristic speeds coalesce and a construction that
    needs strict hyperbolicity cannot proceed."""


class ConfigurationError(RollgapError):
    """Raised for inconsistent simulator settings (CFL out of range, grid too
    coarse, and similar)."""


class StructuralAssumptionError(RollgapError):
    """Raised when profile data violates a structural assumption, e.g. the
    near-sonic characteristic speed not crossing zero transversally."""


class RegularityThresholdError(RollgapError):
    """Raised when a requested derivative order is below the admissible
    regularity threshold of the sonic mode."""

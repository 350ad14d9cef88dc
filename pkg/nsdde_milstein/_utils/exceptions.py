class NsddeError(Exception):
    """Base class for all errors raised by nsdde_milstein."""


class ContractionViolated(NsddeError, ValueError):
    """The neutral term is not a contraction (kappa outside (0, 1))."""


class NeutralOriginViolated(NsddeError, ValueError):
    """D(0) is not the zero vector."""


class GridMismatch(NsddeError, ValueError):
    """Delay and horizon have no common step, or grids do not line up."""


class BadExponent(NsddeError, ValueError):
    pass


class BadStep(NsddeError, ValueError):
    pass


class OutOfSegment(NsddeError, ValueError):
    pass


class UnknownProblem(NsddeError, KeyError):
    pass


class ResolutionMismatch(NsddeError, ValueError):
    """The fine Brownian path cannot be aggregated onto the requested grid."""


class NonFiniteInput(NsddeError, ValueError):
    pass


class OutOfRange(NsddeError, ValueError):
    pass


class InsufficientPaths(NsddeError, ValueError):
    pass


class DegenerateFit(NsddeError, ValueError):
    pass


class BadFlag(NsddeError, ValueError):
    """Malformed command line flag or configuration file entry."""


class ConstraintViolation(NsddeError, ValueError):
    """Well-formed configuration that breaks a cross-field constraint."""

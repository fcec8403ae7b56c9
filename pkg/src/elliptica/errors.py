"""Exception types raised by the builders and checks."""


class EllipticaError(Exception):
    """Base class for all package errors."""


class InvalidPair(EllipticaError, ValueError):
    pass


class DegenerateParameters(EllipticaError):
    """A parameter set sits on (or numerically near) a degenerate locus."""


class DegenerateEta(DegenerateParameters):
    pass


class SampleDegenerate(DegenerateParameters):
    """Random sampling could not avoid denominator zeros within the retry budget."""


class PoleAtArgument(DegenerateParameters):
    pass


class BoxTooSmall(EllipticaError):
    pass


class InconsistentPairing(EllipticaError):
    pass


class WorkspaceExceeded(EllipticaError):
    pass


class IllConditioned(EllipticaError):
    pass


class ConstraintViolated(EllipticaError, ValueError):
    pass


class InvalidStructureConstants(EllipticaError, ValueError):
    pass


class DimensionMismatch(EllipticaError, ValueError):
    pass


class DegreeCapExceeded(EllipticaError):
    pass


class OffCurve(EllipticaError):
    pass


class SingularSystem(EllipticaError):
    pass

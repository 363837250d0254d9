"""Exception hierarchy shared by every module."""


class InvdistError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class ConfigurationError(InvdistError):
    exit_code = 2


class CapabilityError(ConfigurationError):
    """Requested backend cannot supply the quantity a suite needs."""


class GeometryError(InvdistError):
    """Degenerate gradient, off-boundary input or non-unique projection."""


class RegionError(GeometryError):
    """Point outside the working region of a local model."""


class DomainError(InvdistError):
    """Argument outside the open domain of a closed-form formula."""


class DegeneracyError(InvdistError):
    pass


class SingularityError(InvdistError):
    pass


class SamplingError(InvdistError):
    pass


class NumericError(InvdistError):
    """Iterative solver failed or a boundary-distance floor was violated."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RangeError(InvdistError):
    """A ray leaves the domain before the requested parameter."""

    def __init__(self, message, max_parameter):
        super().__init__(message)
        self.max_parameter = max_parameter

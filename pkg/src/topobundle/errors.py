"""Exception types raised by the library."""


class TopoBundleError(Exception):
    """Base class for all computation errors."""


class OriginError(TopoBundleError, ValueError):
    """The Bloch vector is zero, so eigenvectors and angles are undefined."""


class ChartDomainError(TopoBundleError, ValueError):
    """A polar angle lies outside the domain of the requested chart."""


class OrthogonalNeighborsError(TopoBundleError):
    """Two neighbouring sampled states are (nearly) orthogonal."""


class FluxBranchError(TopoBundleError):
    """A plaquette flux sits too close to the branch cut at +-pi."""


class GapClosedError(TopoBundleError):
    """d(k) vanishes: the SSH chain is metallic and eigenstates are undefined."""


class ConvergenceError(TopoBundleError):
    """The dense eigensolver failed or missed its residual bound."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ArgumentError(TopoBundleError, ValueError):
    """Invalid argument to a model constructor."""

"""Topological characteristics of two-level Hamiltonians and the SSH chain."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ArgumentError,
    ChartDomainError,
    ConvergenceError,
    FluxBranchError,
    GapClosedError,
    OriginError,
    OrthogonalNeighborsError,
    TopoBundleError,
)
from .invariants import chern_number, classify, winding_number, zak_phase  # noqa: E402
from .ssh import SshConfig  # noqa: E402
from .two_level import Band, BlochVector3, Chart, SphericalCoords, StateVector  # noqa: E402

"""Chart bookkeeping on the parameter sphere and closed-form Berry geometry.

Conventions
-----------
Connections are ``A = i <psi | d psi>`` and have no ``d theta`` component for
any of the sections in :mod:`topobundle.two_level`.  Curvatures are returned as
the coefficient of ``d theta ^ d phi``.  Flux integrals are accumulated in that
ordering and multiplied by :data:`CHERN_ORIENTATION` when converted into a
Chern number; the sign is fixed so that the lower band has ``C = -1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ChartDomainError
from .tolerances import DEFAULT, Tolerances
from .two_level import Band, Chart, charts_at, in_chart, section_array

CHERN_ORIENTATION = -1


@dataclass(frozen=True)
class ConnectionSample:
    a_phi: float
    a_theta: float
    chart: Chart


@dataclass(frozen=True)
class CurvatureSample:
    f_theta_phi: float


@dataclass(frozen=True)
class SphereGrid:
    """Uniform (theta, phi) grid with both poles included and phi wrapping.

    Rows ``i = 0..n_theta`` sit at ``theta = i pi / n_theta``; columns
    ``j = 0..n_phi-1`` at ``phi = 2 pi j / n_phi``.
    """

    n_theta: int
    n_phi: int
    overlap_eps: float = DEFAULT.overlap_eps

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("grid dimensions must be positive")

    @cached_property
    def thetas(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.n_theta + 1)

    @cached_property
    def phis(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def d_theta(self) -> float:
        return math.pi / self.n_theta

    @property
    def d_phi(self) -> float:
        return 2.0 * math.pi / self.n_phi

    @property
    def nodes(self) -> list[tuple[float, float]]:
        return [(float(t), float(p)) for t in self.thetas for p in self.phis]

    def charts(self, i: int) -> frozenset:
        return charts_at(float(self.thetas[i]), self.overlap_eps)

    def regular_chart(self, i: int) -> Chart:
        """Chart whose section is smooth on row ``i`` (north up to the equator)."""
        return Chart.NORTH if self.thetas[i] <= 0.5 * math.pi else Chart.SOUTH

    def section_states(self, band: Band, chi=0.0) -> np.ndarray:
        """Band states on every node, shape ``(n_theta + 1, n_phi, 2)``.

        ``chi`` may be a scalar or an array broadcastable to the node grid.
        """
        theta, phi = np.meshgrid(self.thetas, self.phis, indexing="ij")
        chi = np.broadcast_to(np.asarray(chi, float), theta.shape)
        north = theta <= 0.5 * math.pi
        out = np.empty(theta.shape + (2,), dtype=complex)
        out[north] = section_array(theta[north], phi[north], band, Chart.NORTH, chi[north])
        out[~north] = section_array(
            theta[~north], phi[~north], band, Chart.SOUTH, chi[~north]
        )
        return out


def transition_function(phi: float, delta_chi: float, band: Band = Band.LOWER) -> complex:
    """U(1) factor ``t_NS`` with ``north = t_NS * south`` on the overlap.

    ``delta_chi`` is ``chi_N - chi_S``.
    """
    winding = -1.0 if band is Band.LOWER else 1.0
    return cmath.exp(1j * (winding * phi + delta_chi))


def connection_analytic(
    theta: float, chart: Chart, band: Band, tol: Tolerances = DEFAULT
) -> ConnectionSample:
    if not in_chart(theta, chart, tol.overlap_eps):
        raise ChartDomainError(f"theta={theta!r} is outside the {chart.value} chart")
    if chart is Chart.NORTH:
        a = math.sin(0.5 * theta) ** 2
    else:
        a = -math.cos(0.5 * theta) ** 2
    if band is Band.UPPER:
        a = -a
    return ConnectionSample(a_phi=a, a_theta=0.0, chart=chart)


def curvature_analytic(theta: float, band: Band) -> CurvatureSample:
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta={theta!r} outside [0, pi]")
    f = 0.5 * math.sin(theta)
    return CurvatureSample(f if band is Band.LOWER else -f)


def chart_consistency_check(theta: float, phi: float, tol: Tolerances = DEFAULT) -> float:
    """Lower band: ``a_phi(N) - a_phi(S) - 1``, zero on the whole overlap."""
    if not (in_chart(theta, Chart.NORTH, tol.overlap_eps) and in_chart(theta, Chart.SOUTH, tol.overlap_eps)):
        raise ChartDomainError(f"theta={theta!r} is not in the chart overlap")
    north = connection_analytic(theta, Chart.NORTH, Band.LOWER, tol)
    south = connection_analytic(theta, Chart.SOUTH, Band.LOWER, tol)
    return north.a_phi - south.a_phi - 1.0

"""Exact algebra of the two-level Hamiltonian H = d . sigma.

Sections of the lower and upper eigen-line bundles are given in closed form on
two charts of the parameter sphere:

    lower, north:  ( e^{-i phi} sin(theta/2), -cos(theta/2) )
    lower, south:  ( sin(theta/2), -e^{i phi} cos(theta/2) )
    upper, north:  ( cos(theta/2),  e^{i phi} sin(theta/2) )
    upper, south:  ( e^{-i phi} cos(theta/2), sin(theta/2) )

each multiplied by a gauge factor e^{i chi}.  The north sections are regular at
theta = 0 and the south sections at theta = pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError, OriginError
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * math.pi


class Band(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"

    @property
    def sign(self) -> int:
        return -1 if self is Band.LOWER else 1


class Chart(enum.Enum):
    NORTH = "north"
    SOUTH = "south"


@dataclass(frozen=True)
class BlochVector3:
    dx: float
    dy: float
    dz: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.dx * self.dx + self.dy * self.dy + self.dz * self.dz)

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.dz], dtype=float)


@dataclass(frozen=True)
class SphericalCoords:
    d: float
    theta: float
    phi: float


@dataclass(frozen=True)
class StateVector:
    phi1: complex
    phi2: complex
    chi: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2], dtype=complex)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.phi1) ** 2 + abs(self.phi2) ** 2)

    @classmethod
    def from_array(cls, amps, chi: float = 0.0) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        return cls(complex(amps[0]), complex(amps[1]), float(chi))


def hamiltonian_from_bloch(d: BlochVector3) -> np.ndarray:
    return np.array(
        [[d.dz, d.dx - 1j * d.dy], [d.dx + 1j * d.dy, -d.dz]], dtype=complex
    )


def eigenvalues(d: BlochVector3) -> tuple[float, float]:
    """Return ``(E_lower, E_upper) = (-|d|, +|d|)``."""
    n = d.norm
    return -n, n


def _canonical_azimuth(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2 pi
    if phi >= TWO_PI:
        phi = 0.0
    return phi


def cartesian_to_spherical(d: BlochVector3) -> SphericalCoords:
    r = d.norm
    if r == 0.0:
        raise OriginError("the Bloch vector d = 0 has no direction")
    rho = math.hypot(d.dx, d.dy)
    theta = math.atan2(rho, d.dz)
    phi = 0.0 if rho == 0.0 else _canonical_azimuth(math.atan2(d.dy, d.dx))
    return SphericalCoords(r, theta, phi)


def spherical_to_cartesian(c: SphericalCoords) -> BlochVector3:
    st = math.sin(c.theta)
    return BlochVector3(
        c.d * st * math.cos(c.phi), c.d * st * math.sin(c.phi), c.d * math.cos(c.theta)
    )


def in_chart(theta, chart: Chart, eps: float = DEFAULT.overlap_eps):
    """Whether polar angle(s) ``theta`` lie in the (closed) domain of ``chart``."""
    theta = np.asarray(theta, dtype=float)
    ok = (theta >= 0.0) & (theta <= math.pi)
    if chart is Chart.NORTH:
        return ok & (theta <= 0.5 * math.pi + eps)
    return ok & (theta >= 0.5 * math.pi - eps)


def charts_at(theta: float, eps: float = DEFAULT.overlap_eps) -> frozenset:
    return frozenset(c for c in Chart if in_chart(theta, c, eps))


def section_array(theta, phi, band: Band, chart: Chart, chi=0.0) -> np.ndarray:
    """Vectorised closed-form sections; returns shape ``broadcast + (2,)``.

    No domain checks; callers that accept user input go through
    :func:`eigenvector_chart`.
    """
    theta, phi, chi = np.broadcast_arrays(
        np.asarray(theta, float), np.asarray(phi, float), np.asarray(chi, float)
    )
    s = np.sin(0.5 * theta)
    c = np.cos(0.5 * theta)
    e_minus = np.exp(-1j * phi)
    gauge = np.exp(1j * chi)
    out = np.empty(theta.shape + (2,), dtype=complex)
    if band is Band.LOWER:
        if chart is Chart.NORTH:
            out[..., 0], out[..., 1] = e_minus * s, -c
        else:
            out[..., 0], out[..., 1] = s, -np.conj(e_minus) * c
    else:
        if chart is Chart.NORTH:
            out[..., 0], out[..., 1] = c, np.conj(e_minus) * s
        else:
            out[..., 0], out[..., 1] = e_minus * c, s
    return out * gauge[..., None]


def eigenvector_chart(
    coords: SphericalCoords,
    band: Band,
    chart: Chart,
    chi: float = 0.0,
    tol: Tolerances = DEFAULT,
) -> StateVector:
    if coords.d <= 0.0:
        raise OriginError("eigenvectors are undefined at d = 0")
    if not in_chart(coords.theta, chart, tol.overlap_eps):
        raise ChartDomainError(
            f"theta={coords.theta!r} is outside the {chart.value} chart "
            f"(overlap half-width {tol.overlap_eps!r})"
        )
    amps = section_array(coords.theta, coords.phi, band, chart, chi)
    return StateVector.from_array(amps, chi)


def gauge_transform(s: StateVector, delta_chi: float) -> StateVector:
    g = complex(math.cos(delta_chi), math.sin(delta_chi))
    return StateVector(s.phi1 * g, s.phi2 * g, s.chi + delta_chi)


def project_to_sphere(s: StateVector) -> BlochVector3:
    """Hopf projection of a normalised state onto the unit sphere.

    Inverts the lower-band sections: for any chart and gauge,
    ``project_to_sphere(eigenvector_chart(c, Band.LOWER, ...))`` is the unit
    vector of ``c``.
    """
    z = s.phi1 * s.phi2.conjugate()
    return BlochVector3(
        -2.0 * z.real,
        2.0 * z.imag,
        abs(s.phi2) ** 2 - abs(s.phi1) ** 2,
    )

"""Su-Schrieffer-Heeger chain: Bloch vector, bands, eigenstates, real-space chain."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArgumentError, ConvergenceError, GapClosedError
from .sphere_bundle import ConnectionSample
from .tolerances import DEFAULT, Tolerances
from .two_level import Band, Chart, StateVector


@dataclass(frozen=True)
class SshConfig:
    v: float
    w: float
    a: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.w) and math.isfinite(self.a)):
            raise ArgumentError("v, w and a must be finite")
        if self.v < 0 or self.w < 0:
            raise ArgumentError("hoppings v and w must be non-negative")
        if self.v == 0 and self.w == 0:
            raise ArgumentError("v and w cannot both vanish")
        if self.a <= 0:
            raise ArgumentError("lattice constant a must be positive")

    @property
    def scale(self) -> float:
        return max(self.v, self.w)

    def is_metallic(self, tol: Tolerances = DEFAULT) -> bool:
        return abs(self.v - self.w) < tol.metallic_rel * self.scale


@dataclass(frozen=True)
class BlochVector2:
    dx: float
    dy: float
    k: float

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dy)


class Boundary(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ChainMatrix:
    matrix: np.ndarray
    n_cells: int
    boundary: Boundary

    @property
    def size(self) -> int:
        return 2 * self.n_cells


@dataclass(frozen=True)
class ChainSpectrum:
    energies: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors
    max_residual: float


@dataclass(frozen=True)
class EdgeReport:
    count: int
    energies: np.ndarray
    left_weight: np.ndarray
    right_weight: np.ndarray

    @property
    def edge_weight(self) -> np.ndarray:
        return self.left_weight + self.right_weight


def bloch_vector(k: float, cfg: SshConfig) -> BlochVector2:
    ka = k * cfg.a
    return BlochVector2(cfg.v + cfg.w * math.cos(ka), cfg.w * math.sin(ka), k)


def d_norm(k, cfg: SshConfig):
    """|d(k)| from the closed form sqrt(v^2 + w^2 + 2 v w cos ka); vectorised."""
    ka = np.asarray(k, float) * cfg.a
    sq = cfg.v ** 2 + cfg.w ** 2 + 2.0 * cfg.v * cfg.w * np.cos(ka)
    return np.sqrt(np.maximum(sq, 0.0))


def bands(k: float, cfg: SshConfig) -> tuple[float, float]:
    e = float(d_norm(k, cfg))
    return -e, e


def bloch_hamiltonian(k: float, cfg: SshConfig) -> np.ndarray:
    d = bloch_vector(k, cfg)
    return np.array([[0.0, d.dx - 1j * d.dy], [d.dx + 1j * d.dy, 0.0]], dtype=complex)


def phi_array(k, cfg: SshConfig, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Vectorised polar angle of d(k); raises GapClosedError where d(k) = 0."""
    ka = np.asarray(k, float) * cfg.a
    dx = cfg.v + cfg.w * np.cos(ka)
    dy = cfg.w * np.sin(ka)
    if np.any(d_norm(k, cfg) < tol.gap_floor * cfg.scale):
        raise GapClosedError(
            "metallic configuration: d(k) = 0 (bands touch at ka = +-pi when v = w)"
        )
    return np.arctan2(dy, dx)


def phi_of_k(k: float, cfg: SshConfig, tol: Tolerances = DEFAULT) -> float:
    """Polar angle of d(k) in (-pi, pi]."""
    phi = float(phi_array(k, cfg, tol))
    return math.pi if phi == -math.pi else phi


def phi_path(ks, cfg: SshConfig, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Continuous branch of phi(k) along ``ks``.

    The branch is pinned so the sample in the middle of the path lies in
    (-pi, pi]; on a symmetric BZ grid that is phi(0) = 0.
    """
    path = np.unwrap(phi_array(ks, cfg, tol))
    if path.size:
        mid = path[(path.size - 1) // 2]
        path = path - 2.0 * math.pi * np.ceil((mid - math.pi) / (2.0 * math.pi))
    return path


def eigenstate(
    k: float, cfg: SshConfig, band: Band, chi: float = 0.0, tol: Tolerances = DEFAULT
) -> StateVector:
    """``(+-e^{-i phi(k)}, 1) e^{i chi} / sqrt(2)``, sign + for the upper band."""
    phi = phi_of_k(k, cfg, tol)
    return StateVector.from_array(eigenstate_array(phi, band, chi), chi)


def eigenstate_array(phi, band: Band, chi=0.0) -> np.ndarray:
    phi, chi = np.broadcast_arrays(np.asarray(phi, float), np.asarray(chi, float))
    out = np.empty(phi.shape + (2,), dtype=complex)
    out[..., 0] = band.sign * np.exp(-1j * phi)
    out[..., 1] = 1.0
    return out * (np.exp(1j * chi) / math.sqrt(2.0))[..., None]


def projection_solvable(phi: float, cfg: SshConfig) -> Optional[float]:
    """Solve ``sin(ka + phi) = -(v/w) sin(phi)`` for ka, or None when impossible."""
    if cfg.w <= 0:
        raise ArgumentError("projection needs w > 0")
    rhs = (cfg.v / cfg.w) * math.sin(phi)
    if abs(rhs) > 1.0:
        return None
    return -phi - math.asin(rhs)


def connection_ssh(phi: float) -> ConnectionSample:
    # the section (-e^{-i phi}, 1)/sqrt(2) is global; there is a single chart
    return ConnectionSample(a_phi=0.5, a_theta=0.0, chart=Chart.NORTH)


def build_chain(n_cells: int, cfg: SshConfig, boundary: Boundary = Boundary.OPEN) -> ChainMatrix:
    """Real-space Hamiltonian over |A,1>, |B,1>, ..., |A,N>, |B,N>."""
    boundary = Boundary(boundary)
    if n_cells < 1:
        raise ArgumentError("n_cells must be at least 1")
    if boundary is Boundary.PERIODIC and n_cells < 2:
        raise ArgumentError("a periodic chain needs at least 2 cells")
    size = 2 * n_cells
    h = np.zeros((size, size))
    a_sites = np.arange(0, size, 2)
    h[a_sites, a_sites + 1] = cfg.v
    h[a_sites[1:] - 1, a_sites[1:]] = cfg.w
    if boundary is Boundary.PERIODIC:
        h[size - 1, 0] = cfg.w
    h = h + h.T
    return ChainMatrix(h, n_cells, boundary)


def chain_spectrum(m: ChainMatrix) -> ChainSpectrum:
    h = m.matrix
    try:
        energies, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}", {"size": h.shape[0]}) from exc
    scale = max(np.linalg.norm(h, 2), 1.0)
    residual = float(np.max(np.linalg.norm(h @ vectors - vectors * energies, axis=0), initial=0.0))
    if residual > 1e-8 * scale:
        raise ConvergenceError(
            "eigensolver residual above bound",
            {"size": h.shape[0], "max_residual": residual, "bound": 1e-8 * scale},
        )
    return ChainSpectrum(energies, vectors, residual)


def edge_state_report(
    spectrum: ChainSpectrum,
    n_cells: int,
    zero_tol: float,
    edge_cells: int = 10,
) -> EdgeReport:
    """Near-zero modes and their weight in the ``edge_cells`` outermost cells per side."""
    picked = np.flatnonzero(np.abs(spectrum.energies) < zero_tol)
    prob = np.abs(spectrum.vectors[:, picked]) ** 2
    width = 2 * min(edge_cells, n_cells)
    left = prob[:width].sum(axis=0)
    # do not double count when the two edge windows overlap
    right_start = max(2 * n_cells - width, width)
    right = prob[right_start:].sum(axis=0)
    return EdgeReport(int(picked.size), spectrum.energies[picked], left, right)


def default_zero_tol(cfg: SshConfig, tol: Tolerances = DEFAULT) -> float:
    return tol.edge_zero_rel * cfg.scale

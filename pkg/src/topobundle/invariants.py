"""Topological invariants: Chern number on the sphere, Zak phase and winding for SSH."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .berry_numerics import PlaquetteGrid, StateChain, plaquette_flux_sum, wilson_loop_phase, wrap_phase
from .errors import GapClosedError
from .sphere_bundle import CHERN_ORIENTATION, SphereGrid
from .ssh import SshConfig, d_norm, eigenstate_array, phi_array
from .tolerances import DEFAULT, Tolerances
from .two_level import Band

# midpoint-rule error of the analytic route is ~ (pi / n_theta)^2 / 24
ANALYTIC_GRID = (1024, 2048)
MIN_GRID = 12
MIN_SAMPLES = 16


class ChernMethod(enum.Enum):
    PLAQUETTE = "plaquette"
    ANALYTIC = "analytic-quadrature"


class ZakSnap(enum.Enum):
    ZERO = "0"
    PI = "pi"
    UNQUANTIZED = "unquantized"


class PhaseLabel(enum.Enum):
    TRIVIAL = "trivial-insulator"
    TOPOLOGICAL = "topological-insulator"
    METALLIC = "metallic"


@dataclass(frozen=True)
class ChernResult:
    value: int
    raw_total: float
    n_theta: int
    n_phi: int
    method: ChernMethod

    def accepted(self, tol: Tolerances = DEFAULT) -> bool:
        return abs(self.raw_total - self.value) < tol.chern_accept


@dataclass(frozen=True)
class ZakResult:
    phase: float
    snapped: ZakSnap
    samples: int

    @property
    def snapped_value(self) -> Optional[float]:
        return {ZakSnap.ZERO: 0.0, ZakSnap.PI: math.pi}.get(self.snapped)


@dataclass(frozen=True)
class PhaseReport:
    v: float
    w: float
    gap: float
    gap_location: float
    zak: Optional[float]
    zak_raw: Optional[float]
    winding: Optional[int]
    label: PhaseLabel


def chern_number(
    band: Band,
    n_theta: Optional[int] = None,
    n_phi: Optional[int] = None,
    method: ChernMethod = ChernMethod.PLAQUETTE,
    chi=0.0,
    tol: Tolerances = DEFAULT,
) -> ChernResult:
    """Chern number of ``band`` over the parameter sphere.

    The plaquette route multiplies overlaps of the chart sections (``chi`` sets
    an optional per-node gauge and must not change the result).  The analytic
    route applies the composite midpoint rule to the closed-form curvature;
    it defaults to the finer :data:`ANALYTIC_GRID`.
    """
    method = ChernMethod(method)
    if method is ChernMethod.ANALYTIC:
        n_theta = n_theta or ANALYTIC_GRID[0]
        n_phi = n_phi or ANALYTIC_GRID[1]
    else:
        n_theta = n_theta or 24
        n_phi = n_phi or 24
    if min(n_theta, n_phi) < MIN_GRID:
        raise ValueError(f"Chern grids must be at least {MIN_GRID}x{MIN_GRID}")

    grid = SphereGrid(n_theta, n_phi, tol.overlap_eps)
    if method is ChernMethod.PLAQUETTE:
        _, total = plaquette_flux_sum(PlaquetteGrid(grid.section_states(band, chi)), tol)
    else:
        mid = (np.arange(n_theta) + 0.5) * grid.d_theta
        f = 0.5 * np.sin(mid) * (1.0 if band is Band.LOWER else -1.0)
        # integrand is phi-independent, so the phi sum is n_phi equal terms
        total = math.fsum(f * grid.d_theta) * n_phi * grid.d_phi
    raw = CHERN_ORIENTATION * total / (2.0 * math.pi)
    return ChernResult(int(round(raw)), raw, n_theta, n_phi, method)


def bz_grid(cfg: SshConfig, n_samples: int) -> np.ndarray:
    """Uniform closed-loop grid k_j = (-pi + 2 pi j / N) / a, j < N."""
    return (-math.pi + 2.0 * math.pi * np.arange(n_samples) / n_samples) / cfg.a


def _require_insulator(cfg: SshConfig, n_samples: int, tol: Tolerances) -> None:
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} BZ samples")
    if cfg.is_metallic(tol):
        raise GapClosedError(
            "metallic configuration: Zak phase undefined (gap closes at ka = +-pi for v = w)"
        )


def snap_zak(phase: float, tol: Tolerances = DEFAULT) -> ZakSnap:
    if abs(phase) < tol.zak_snap:
        return ZakSnap.ZERO
    if abs(float(wrap_phase(phase - math.pi))) < tol.zak_snap:
        return ZakSnap.PI
    return ZakSnap.UNQUANTIZED


def zak_phase(cfg: SshConfig, n_samples: int = 1024, chi=0.0, tol: Tolerances = DEFAULT) -> ZakResult:
    """Wilson loop of lower-band eigenstates around the Brillouin zone."""
    _require_insulator(cfg, n_samples, tol)
    ks = bz_grid(cfg, n_samples)
    states = eigenstate_array(phi_array(ks, cfg, tol), Band.LOWER, chi)
    phase = wilson_loop_phase(StateChain(states, closed=True), tol)
    return ZakResult(phase, snap_zak(phase, tol), n_samples)


def winding_number(cfg: SshConfig, n_samples: int = 1024, tol: Tolerances = DEFAULT) -> int:
    """Net number of turns of d(k) about the origin over the Brillouin zone."""
    _require_insulator(cfg, n_samples, tol)
    ks = bz_grid(cfg, n_samples)
    ka = ks * cfg.a
    angles = np.arctan2(cfg.w * np.sin(ka), cfg.v + cfg.w * np.cos(ka))
    steps = wrap_phase(np.diff(np.append(angles, angles[0])))
    return int(round(math.fsum(steps) / (2.0 * math.pi)))


def min_gap(cfg: SshConfig, n_samples: int = 1024) -> tuple[float, float]:
    """Smallest direct gap 2 d(k) on a BZ grid that contains ka = pi."""
    ks = np.append(bz_grid(cfg, n_samples), math.pi / cfg.a)
    gaps = 2.0 * d_norm(ks, cfg)
    # prefer +pi/a over -pi/a on ties
    i = len(ks) - 1 - int(np.argmin(gaps[::-1]))
    return float(gaps[i]), float(ks[i])


def classify(cfg: SshConfig, n_samples: int = 1024, tol: Tolerances = DEFAULT) -> PhaseReport:
    gap, where = min_gap(cfg, n_samples)
    if cfg.is_metallic(tol):
        return PhaseReport(cfg.v, cfg.w, gap, where, None, None, None, PhaseLabel.METALLIC)
    zak = zak_phase(cfg, n_samples, tol=tol)
    winding = winding_number(cfg, n_samples, tol)
    label = PhaseLabel.TOPOLOGICAL if winding == 1 else PhaseLabel.TRIVIAL
    return PhaseReport(cfg.v, cfg.w, gap, where, zak.snapped_value, zak.phase, winding, label)

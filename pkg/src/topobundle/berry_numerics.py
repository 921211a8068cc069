"""Gauge-invariant discrete Berry geometry from overlaps of sampled states.

A link between neighbouring states carries the phase
``alpha = -Im log <s_i|s_{i+1}>``, which approximates the integral of the
connection ``i <s|ds>`` along the link.  Products of overlaps around closed
loops (Wilson loops, plaquettes) do not depend on the phase chosen for any
individual state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FluxBranchError, OrthogonalNeighborsError
from .tolerances import DEFAULT, Tolerances
from .two_level import StateVector

_NORM_TOL = 1e-10


def wrap_phase(x):
    """Map angles onto the principal interval (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(x, float), 2.0 * math.pi)


def _as_state_array(states) -> np.ndarray:
    if len(states) and isinstance(states[0], StateVector):
        arr = np.array([s.as_array() for s in states])
    else:
        arr = np.asarray(states, dtype=complex)
    if arr.ndim < 2 or arr.shape[-1] != 2:
        raise ValueError(f"expected states with trailing dimension 2, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=-1)
    if not np.allclose(norms, 1.0, rtol=0.0, atol=_NORM_TOL):
        raise ValueError("all sampled states must be normalised")
    return arr


@dataclass(frozen=True)
class StateChain:
    """Ordered samples of one band along a curve; ``closed`` adds the last->first link."""

    states: np.ndarray
    closed: bool = False

    def __post_init__(self):
        arr = _as_state_array(self.states)
        if arr.ndim != 2:
            raise ValueError("a chain is a 1D sequence of states")
        object.__setattr__(self, "states", arr)

    @classmethod
    def from_states(cls, states: Sequence, closed: bool = False) -> "StateChain":
        return cls(_as_state_array(states), closed)

    def __len__(self):
        return len(self.states)

    def link_overlaps(self) -> np.ndarray:
        s = self.states
        nxt = np.roll(s, -1, axis=0) if self.closed else s[1:]
        cur = s if self.closed else s[:-1]
        return np.einsum("ij,ij->i", cur.conj(), nxt)


@dataclass(frozen=True)
class PlaquetteGrid:
    """States of one band on a rectangular node grid that wraps along axis 1."""

    states: np.ndarray

    def __post_init__(self):
        arr = _as_state_array(self.states)
        if arr.ndim != 3:
            raise ValueError("plaquette grid needs shape (rows, cols, 2)")
        object.__setattr__(self, "states", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.states.shape[:2]


def _check_links(overlaps: np.ndarray, floor: float) -> None:
    mags = np.abs(overlaps)
    if mags.size and mags.min() < floor:
        bad = int(np.argmin(mags))
        raise OrthogonalNeighborsError(
            f"link {bad} has overlap modulus {mags.flat[bad]:.3e} < {floor:.1e}; sample more densely"
        )


def discrete_connection(chain: StateChain, tol: Tolerances = DEFAULT) -> np.ndarray:
    ov = chain.link_overlaps()
    _check_links(ov, tol.overlap_floor)
    return -np.angle(ov)


def wilson_loop_phase(chain: StateChain, tol: Tolerances = DEFAULT) -> float:
    if not chain.closed:
        raise ValueError("a Wilson loop needs a closed chain")
    ov = chain.link_overlaps()
    _check_links(ov, tol.overlap_floor)
    # normalise each factor so long products neither under- nor overflow
    prod = np.prod(ov / np.abs(ov))
    return float(wrap_phase(-np.angle(prod)))


def plaquette_flux_sum(grid: PlaquetteGrid, tol: Tolerances = DEFAULT) -> tuple[np.ndarray, float]:
    """Flux through each cell ``(i,j),(i+1,j),(i+1,j+1),(i,j+1)``.

    Returns the ``(rows - 1, cols)`` array of fluxes in (-pi, pi] and their sum.
    The sum is accumulated with :func:`math.fsum` so it is independent of
    evaluation order.
    """
    s = grid.states
    s_right = np.roll(s, -1, axis=1)
    # links along axis 0 at columns j and j+1, along axis 1 at rows i and i+1
    down = np.einsum("ijk,ijk->ij", s[:-1].conj(), s[1:])
    across = np.einsum("ijk,ijk->ij", s.conj(), s_right)
    for ov in (down, across):
        _check_links(ov, tol.overlap_floor)
    down_right = np.roll(down, -1, axis=1)
    loop = down * across[1:] * down_right.conj() * across[:-1].conj()
    fluxes = wrap_phase(-np.angle(loop))
    near_cut = math.pi - np.abs(fluxes)
    if near_cut.min() < tol.flux_margin:
        i, j = np.unravel_index(int(np.argmin(near_cut)), fluxes.shape)
        raise FluxBranchError(
            f"plaquette ({i}, {j}) has flux {fluxes[i, j]:.6f}, within {tol.flux_margin:g} of +-pi; refine the grid"
        )
    return fluxes, math.fsum(fluxes.ravel())

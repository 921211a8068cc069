"""Numerical tolerances, kept in one place so the CLI can override them."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    atol: float = 1e-10
    # half-width of the equatorial band where both sphere charts are valid
    overlap_eps: float = math.pi / 20
    # smallest |<s_i|s_j>| accepted for a link
    overlap_floor: float = 1e-8
    # plaquette fluxes closer than this to +-pi are rejected
    flux_margin: float = 1e-6
    zak_snap: float = 1e-4
    chern_accept: float = 1e-6
    # |v - w| < metallic_rel * max(v, w) means metallic
    metallic_rel: float = 1e-9
    # d(k) < gap_floor * max(v, w) is treated as a closed gap
    gap_floor: float = 1e-12
    # edge-mode energy window, relative to max(v, w)
    edge_zero_rel: float = 1e-3

    def replace(self, **overrides) -> "Tolerances":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance key(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT = Tolerances()

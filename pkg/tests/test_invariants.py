import math

import numpy as np
import pytest

from topobundle.berry_numerics import wrap_phase
from topobundle.errors import FluxBranchError, GapClosedError
from topobundle.invariants import (
    ANALYTIC_GRID,
    ChernMethod,
    PhaseLabel,
    ZakSnap,
    chern_number,
    classify,
    min_gap,
    snap_zak,
    winding_number,
    zak_phase,
)
from topobundle.ssh import SshConfig
from topobundle.tolerances import DEFAULT
from topobundle.two_level import Band


def midpoint_sphere_flux(n_theta):
    # oracle: composite midpoint rule for the integral of (1/2) sin(theta) over [0, pi], times 2 pi
    h = math.pi / n_theta
    return 2 * math.pi * math.fsum(0.5 * math.sin((i + 0.5) * h) * h for i in range(n_theta))


# --- Chern ---

@pytest.mark.parametrize("band, expected", [(Band.LOWER, -1), (Band.UPPER, 1)])
def test_chern_examples(band, expected):
    r = chern_number(band, 24, 24)
    assert r.value == expected
    assert abs(r.raw_total - expected) < 1e-9
    assert r.accepted()
    assert (r.n_theta, r.n_phi, r.method) == (24, 24, ChernMethod.PLAQUETTE)


def test_chern_refinement_invariance():
    assert chern_number(Band.LOWER, 12, 12).value == chern_number(Band.LOWER, 96, 96).value == -1


def test_band_sum_rule():
    for n in (12, 20, 33):
        assert chern_number(Band.LOWER, n, n).value + chern_number(Band.UPPER, n, n).value == 0


def test_chern_minimum_grid():
    with pytest.raises(ValueError):
        chern_number(Band.LOWER, 11, 24)


@pytest.mark.parametrize("band", list(Band))
def test_analytic_quadrature_agrees(band):
    r = chern_number(band, method=ChernMethod.ANALYTIC)
    assert (r.n_theta, r.n_phi) == ANALYTIC_GRID
    assert r.value == chern_number(band).value
    assert r.accepted()
    expected = band.sign * midpoint_sphere_flux(ANALYTIC_GRID[0]) / (2 * math.pi)
    assert r.raw_total == pytest.approx(expected, abs=1e-13)


def test_analytic_quadrature_error_is_second_order():
    errs = [abs(chern_number(Band.LOWER, n, 16, method="analytic-quadrature").raw_total + 1) for n in (32, 64, 128)]
    assert errs[0] == pytest.approx((math.pi / 32) ** 2 / 24, rel=1e-2)
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2, abs=0.01)
    assert math.log2(errs[1] / errs[2]) == pytest.approx(2, abs=0.01)


def test_chern_random_gauge_invariance():
    rng = np.random.default_rng(40)
    for _ in range(5):
        chi = rng.uniform(-math.pi, math.pi, size=(25, 24))
        r = chern_number(Band.LOWER, 24, 24, chi=chi)
        assert r.value == -1
        assert abs(r.raw_total + 1) < 1e-9


def test_flux_branch_propagates_on_tight_margin():
    with pytest.raises(FluxBranchError):
        chern_number(Band.LOWER, 12, 12, tol=DEFAULT.replace(flux_margin=4.0))


# --- Zak ---

@pytest.mark.parametrize("v, w, snapped, target", [(1, 2, ZakSnap.PI, math.pi), (2, 1, ZakSnap.ZERO, 0.0)])
def test_zak_examples(v, w, snapped, target):
    r = zak_phase(SshConfig(v, w), 1024)
    assert r.snapped is snapped
    assert r.snapped_value == target
    assert abs(wrap_phase(r.phase - target)) < 1e-6
    assert -math.pi < r.phase <= math.pi
    assert r.samples == 1024


@pytest.mark.parametrize("n", [16, 1024])
def test_zak_metallic(n):
    with pytest.raises(GapClosedError, match="metallic configuration: Zak phase undefined"):
        zak_phase(SshConfig(1, 1), n)


def test_zak_sample_floor():
    with pytest.raises(ValueError):
        zak_phase(SshConfig(1, 2), 15)


def test_zak_random_gauge_invariance():
    rng = np.random.default_rng(41)
    for v, w in [(1, 2), (2, 1), (0.3, 0.4)]:
        cfg = SshConfig(v, w)
        ref = zak_phase(cfg, 1024).phase
        for _ in range(5):
            r = zak_phase(cfg, 1024, chi=rng.uniform(-math.pi, math.pi, size=1024))
            assert abs(wrap_phase(r.phase - ref)) < 1e-10


@pytest.mark.parametrize(
    "phase, expected",
    [(0.0, ZakSnap.ZERO), (5e-5, ZakSnap.ZERO), (-math.pi + 1e-5, ZakSnap.PI), (math.pi, ZakSnap.PI), (1.0, ZakSnap.UNQUANTIZED), (2e-4, ZakSnap.UNQUANTIZED)],
)
def test_snap_zak(phase, expected):
    assert snap_zak(phase) is expected


# --- winding ---

@pytest.mark.parametrize("v, w, expected", [(1, 2, 1), (2, 1, 0)])
def test_winding_examples(v, w, expected):
    assert winding_number(SshConfig(v, w), 256) == expected


def test_winding_refinement_invariance():
    cfg = SshConfig(1, 2)
    assert winding_number(cfg, 17) == winding_number(cfg, 4096) == 1


def test_winding_metallic():
    with pytest.raises(GapClosedError):
        winding_number(SshConfig(2.5, 2.5))


def test_winding_matches_zak_random():
    rng = np.random.default_rng(42)
    for _ in range(50):
        v, w = rng.uniform(0.1, 3, size=2)
        cfg = SshConfig(v, w)
        if cfg.is_metallic():
            continue
        n = winding_number(cfg)
        assert n == (1 if v < w else 0)
        assert zak_phase(cfg).snapped_value == math.pi * n


# --- classifier ---

def test_classify_topological():
    r = classify(SshConfig(1, 2))
    assert r.gap == pytest.approx(2, abs=1e-12)
    assert r.gap_location == pytest.approx(math.pi)
    assert (r.zak, r.winding, r.label) == (math.pi, 1, PhaseLabel.TOPOLOGICAL)


def test_classify_trivial():
    r = classify(SshConfig(2, 1))
    assert r.gap == pytest.approx(2, abs=1e-12)
    assert (r.zak, r.winding, r.label) == (0.0, 0, PhaseLabel.TRIVIAL)


def test_classify_metallic():
    r = classify(SshConfig(1, 1))
    assert r.label is PhaseLabel.METALLIC
    assert r.gap == 0.0
    assert abs(r.gap_location) == pytest.approx(math.pi)
    assert r.zak is None and r.winding is None and r.zak_raw is None


@pytest.mark.parametrize("ratio", [0.5, 0.9, 1.0, 1.1, 2.0])
def test_min_gap_closed_form(ratio):
    cfg = SshConfig(ratio, 1.0)
    gap, where = min_gap(cfg)
    assert abs(gap - 2 * abs(cfg.v - cfg.w)) < 1e-12
    assert where == pytest.approx(math.pi)


def test_min_gap_with_lattice_constant():
    gap, where = min_gap(SshConfig(1.0, 3.0, a=0.5))
    assert gap == pytest.approx(4.0, abs=1e-12)
    assert where == pytest.approx(2 * math.pi)


def test_deformation_invariance():
    # straight paths inside one half-plane keep the label; crossing v = w flips it once
    rng = np.random.default_rng(43)
    for _ in range(10):
        start, end = rng.uniform(0.1, 3, size=2), rng.uniform(0.1, 3, size=2)
        labels, signs = [], []
        for t in np.linspace(0, 1, 25):
            v, w = (1 - t) * start + t * end
            cfg = SshConfig(v, w)
            if cfg.is_metallic():
                continue
            r = classify(cfg, 256)
            labels.append((r.label, r.winding, r.zak))
            signs.append(v < w)
        changes = sum(a != b for a, b in zip(labels, labels[1:]))
        crossings = sum(a != b for a, b in zip(signs, signs[1:]))
        assert changes == crossings <= 1

import numpy as np
import pytest

from spinflop import (
    FIGURE1_HEADER,
    BathParams,
    DriveParams,
    ZeroDrive,
    crossing_point,
    default_k_over_lambda_grid,
    figure1_rows,
    ratio_closed,
    ratio_prefactor,
    retrieval_period,
    sweep_figure1,
)

DRIVE = DriveParams(omega0=1e10, gamma=1e7, omega=1e10)
BATH = BathParams(temperature=300.0, cutoff=DRIVE.k)


def test_ratio_prefactor_value():
    pref = ratio_prefactor(1e10, 300.0)
    assert pref == pytest.approx(1.0318863542608423e-4, rel=1e-12)
    assert pref == pytest.approx(1.03e-4, rel=1e-2)
    # linear in omega0, inverse in temperature
    assert ratio_prefactor(2e10, 300.0) == pytest.approx(2 * pref, rel=1e-14)
    assert ratio_prefactor(1e10, 600.0) == pytest.approx(pref / 2, rel=1e-14)


def test_ratio_closed_reference_point():
    pt = ratio_closed(DRIVE, BATH)
    assert pt.ratio == pytest.approx(0.16324201765769622, rel=1e-12)
    assert pt.omega0_over_gamma == pytest.approx(1000.0, rel=1e-12)
    assert pt.k_over_lambda == pytest.approx(1.0, rel=1e-12)
    assert pt.temperature == 300.0


def test_ratio_point_internal_consistency():
    pt = ratio_closed(DRIVE, BATH)
    assert pt.tau_d * pt.d_factor == pytest.approx(1.0, rel=1e-14)
    assert pt.ratio == pytest.approx(pt.tau_d / pt.tau, rel=1e-14)
    assert pt.tau == pytest.approx(retrieval_period(DRIVE).tau, rel=1e-14)


def test_ratio_closed_rejects_zero_drive():
    with pytest.raises(ZeroDrive):
        ratio_closed(DriveParams(omega0=1e10, gamma=0.0, omega=0.0), BATH)


def test_ratio_saturates_at_large_cutoff_suppression():
    # k/lambda = 50 kills the exponential entirely; what is left is the
    # prefactor times omega0/gamma
    drive = DriveParams(omega0=1e10, gamma=1e7, omega=1e10)
    bath = BathParams(temperature=300.0, cutoff=drive.k / 50.0)
    pt = ratio_closed(drive, bath)
    want = ratio_prefactor(1e10, 300.0) * 1000.0
    assert pt.ratio == pytest.approx(want, rel=1e-15)


def test_sweep_ordering_and_monotonicity():
    grid = default_k_over_lambda_grid(25)
    pts = sweep_figure1(omega0_over_gamma_list=(10.0, 1000.0),
                        k_over_lambda_grid=grid)
    assert len(pts) == 50
    np.testing.assert_allclose([p.k_over_lambda for p in pts[:25]], grid,
                               rtol=1e-12)
    assert all(p.omega0_over_gamma == 10.0 for p in pts[:25])
    assert all(p.omega0_over_gamma == 1000.0 for p in pts[25:])
    for curve in (pts[:25], pts[25:]):
        ratios = [p.ratio for p in curve]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
    # stronger drive (smaller omega0/gamma) always lowers the ratio
    for weak, strong in zip(pts[25:], pts[:25]):
        assert strong.ratio < weak.ratio


def test_sweep_temperature_dependence():
    grid = np.array([0.5])
    cold = sweep_figure1(temperature=150.0, omega0_over_gamma_list=(100.0,),
                         k_over_lambda_grid=grid)[0]
    warm = sweep_figure1(temperature=300.0, omega0_over_gamma_list=(100.0,),
                         k_over_lambda_grid=grid)[0]
    assert cold.ratio == pytest.approx(2 * warm.ratio, rel=1e-10)


def test_sweep_parallel_matches_serial():
    grid = default_k_over_lambda_grid(9)
    serial = sweep_figure1(omega0_over_gamma_list=(10.0, 100.0),
                           k_over_lambda_grid=grid)
    parallel = sweep_figure1(omega0_over_gamma_list=(10.0, 100.0),
                             k_over_lambda_grid=grid, max_workers=4)
    assert serial == parallel


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep_figure1(omega0_over_gamma_list=())
    with pytest.raises(ValueError):
        sweep_figure1(k_over_lambda_grid=np.array([]))
    with pytest.raises(ValueError):
        sweep_figure1(k_over_lambda_grid=np.array([0.0, 1.0]))


def test_default_grid():
    grid = default_k_over_lambda_grid()
    assert len(grid) == 200
    assert grid[0] == pytest.approx(0.01, rel=1e-12)
    assert grid[-1] == pytest.approx(10.0, rel=1e-12)
    # geometric spacing
    steps = grid[1:] / grid[:-1]
    np.testing.assert_allclose(steps, steps[0], rtol=1e-10)


def test_figure1_rows():
    pts = sweep_figure1(omega0_over_gamma_list=(1000.0,),
                        k_over_lambda_grid=np.array([0.5, 1.0]))
    rows = list(figure1_rows(pts))
    assert len(FIGURE1_HEADER) == 7
    for row, pt in zip(rows, pts):
        assert len(row) == 7
        assert row[0] == pt.omega0_over_gamma
        assert row[1] == pt.k_over_lambda
        assert row[2] == pt.d_factor
        assert row[3] == pt.tau_d
        assert row[4] == pt.tau
        assert row[5] == pt.ratio
        # the conservative coherence-time column is a quarter of tau_d
        assert row[6] == pytest.approx(pt.tau_d / 4.0, rel=1e-14)


def test_crossing_point_anchors():
    assert crossing_point(1000.0) == pytest.approx(0.10890973496016096,
                                                   abs=1e-9)
    assert crossing_point(10.0) == pytest.approx(0.0010324191307032647,
                                                 abs=1e-12)
    # a run of 1e5 keeps the ratio above 1 across the whole bracket
    assert crossing_point(1e5) is None


def test_crossing_point_brackets_unity():
    star = crossing_point(1000.0)
    lo = sweep_figure1(omega0_over_gamma_list=(1000.0,),
                       k_over_lambda_grid=np.array([0.99 * star]))[0]
    hi = sweep_figure1(omega0_over_gamma_list=(1000.0,),
                       k_over_lambda_grid=np.array([1.01 * star]))[0]
    assert lo.ratio > 1.0 > hi.ratio


def test_crossing_point_validation():
    with pytest.raises(ValueError):
        crossing_point(0.0)
    with pytest.raises(ValueError):
        crossing_point(1000.0, lo=-1.0)
    with pytest.raises(ValueError):
        crossing_point(1000.0, tol=0.0)

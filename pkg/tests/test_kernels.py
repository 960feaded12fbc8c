import numpy as np
import pytest
from scipy.integrate import quad

from spinflop import (
    CONSTANTS,
    BathParams,
    CothMode,
    QuadratureSettings,
    SeriesInvalid,
    coth_stable,
    dissipation_kernel,
    kernel_table,
    noise_kernel,
    noise_kernel_grid,
    quad_semi_infinite,
    spectral_density,
)

ROOM = BathParams(temperature=300.0, cutoff=1e10)
ROOM_EXACT = BathParams(temperature=300.0, cutoff=1e10,
                        coth_mode=CothMode.exact())
ROOM_SERIES = BathParams(temperature=300.0, cutoff=1e10,
                         coth_mode=CothMode.series(10))


def test_spectral_density_shape():
    lam = ROOM.cutoff
    assert spectral_density(ROOM, 0.0) == 0.0
    assert spectral_density(ROOM, lam) == pytest.approx(lam / np.e, rel=1e-15)
    # single maximum at the cutoff
    ws = np.linspace(0.0, 10 * lam, 2001)
    js = spectral_density(ROOM, ws)
    assert ws[np.argmax(js)] == pytest.approx(lam, rel=2e-3)
    with pytest.raises(ValueError):
        spectral_density(ROOM, -1.0)


def test_quad_semi_infinite_plain_decay():
    val, err = quad_semi_infinite(lambda t: np.exp(-t))
    assert abs(val - 1.0) <= err + 1e-15
    assert abs(val - 1.0) < 1e-12


def test_quad_semi_infinite_oscillatory():
    val, err = quad_semi_infinite(lambda t: np.exp(-t) * np.sin(10 * t),
                                  oscillation_period=2 * np.pi / 10)
    assert abs(val - 10 / 101) <= err + 1e-15
    assert abs(val - 10 / 101) < 1e-12


def test_quad_semi_infinite_gaussian():
    val, err = quad_semi_infinite(lambda t: np.exp(-0.5 * t * t))
    assert abs(val - np.sqrt(np.pi / 2)) <= err + 1e-15
    assert abs(val - np.sqrt(np.pi / 2)) < 1e-12


def test_noise_kernel_high_t_values():
    nu0 = float(noise_kernel(ROOM, 0.0))
    assert nu0 == pytest.approx(7.855220352432385e23, rel=1e-12)
    # Lorentzian falls to half its peak at t = 1/cutoff
    assert float(noise_kernel(ROOM, 1e-10)) == pytest.approx(nu0 / 2,
                                                             rel=1e-12)


def test_noise_kernel_exact_close_to_high_t_at_room_temperature():
    ts = np.linspace(0.0, 5e-10, 41)
    hot = noise_kernel_grid(ROOM, ts)
    ex = noise_kernel_grid(ROOM_EXACT, ts)
    np.testing.assert_allclose(ex, hot, rtol=1e-3)
    # but they are not identical: the quantum correction is visible
    assert np.max(np.abs(ex / hot - 1.0)) > 1e-12


def test_noise_kernel_exact_scalar_quadrature_matches_grid():
    for t in (0.0, 3.7e-11, 1.4e-10):
        scalar = float(noise_kernel(ROOM_EXACT, t))
        grid = float(noise_kernel_grid(ROOM_EXACT, np.array([t]))[0])
        assert scalar == pytest.approx(grid, rel=1e-8)


def test_noise_kernel_series_matches_exact_in_domain():
    ts = np.linspace(0.0, 5e-10, 41)
    ser = noise_kernel_grid(ROOM_SERIES, ts)
    ex = noise_kernel_grid(ROOM_EXACT, ts)
    np.testing.assert_allclose(ser, ex, rtol=1e-8)


def test_noise_kernel_series_rejects_low_temperature():
    cold = BathParams(temperature=0.4, cutoff=1e10,
                      coth_mode=CothMode.series(10))
    with pytest.raises(SeriesInvalid):
        noise_kernel(cold, 1e-10)


def test_noise_kernel_cutoff_monotonicity_window():
    # raising the cutoff raises nu only while cutoff * t < 1
    t = 5e-11
    lams = np.linspace(5e9, 1.9e10, 15)          # lam * t in (0.25, 0.95)
    vals = [float(noise_kernel(BathParams(300.0, lam), t)) for lam in lams]
    assert np.all(np.diff(vals) > 0)
    # beyond the turnover the trend reverses
    lo = float(noise_kernel(BathParams(300.0, 1e10), 2e-10))    # lam t = 2
    hi = float(noise_kernel(BathParams(300.0, 1.2e10), 2e-10))  # lam t = 2.4
    assert hi < lo


def test_noise_kernel_sum_rule_all_modes():
    """Time integral of nu equals pi kB T / hbar regardless of coth mode."""
    lam = ROOM.cutoff
    target = np.pi * CONSTANTS.k_boltzmann * 300.0 / CONSTANTS.hbar
    for bath in (ROOM, ROOM_SERIES, ROOM_EXACT):
        val, _ = quad(
            lambda u: float(noise_kernel_grid(bath, np.array([u / lam]))[0])
            / lam, 0.0, np.inf, limit=400)
        assert val == pytest.approx(target, rel=1e-8), bath.coth_mode.kind


def test_dissipation_kernel_values():
    assert float(dissipation_kernel(ROOM, 0.0)) == 0.0
    # frozen: 2 lam^3 t / (1 + lam^2 t^2)^2 at lam t = 1 is exactly 5e19
    assert float(dissipation_kernel(ROOM, 1e-10)) == pytest.approx(
        5e19, rel=1e-14)
    # single maximum at lam t = 1/sqrt(3)
    ts = np.linspace(1e-12, 5e-10, 4001)
    es = np.asarray(dissipation_kernel(ROOM, ts), float)
    assert ts[np.argmax(es)] == pytest.approx(1e-10 / np.sqrt(3.0), rel=2e-3)


def test_dissipation_kernel_matches_direct_quadrature():
    # eta(t) = int J(w) sin(w t) dw, done independently
    t = 7e-11
    lam = ROOM.cutoff
    val, err = quad_semi_infinite(
        lambda w: w * lam * np.exp(-w) * np.sin(w * lam * t) * lam,
        oscillation_period=2 * np.pi / (lam * t))
    assert float(dissipation_kernel(ROOM, t)) == pytest.approx(
        val, rel=1e-9)


def test_dissipation_kernel_independent_of_coth_mode():
    ts = np.linspace(0.0, 3e-10, 7)
    a = np.asarray(dissipation_kernel(ROOM, ts), float)
    b = np.asarray(dissipation_kernel(ROOM_EXACT, ts), float)
    np.testing.assert_array_equal(a, b)


def test_quadrature_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSettings(abs_tol=-1e-12)
    with pytest.raises(ValueError):
        QuadratureSettings(max_subdivisions=0)
    with pytest.raises(ValueError):
        QuadratureSettings(omega_upper_factor=10.0)


def test_kernel_table():
    ts = np.linspace(0.0, 2e-10, 9)
    rows = kernel_table(ROOM, ts)
    assert len(rows) == 9
    assert all(len(row) == 3 for row in rows)
    nus = noise_kernel_grid(ROOM, ts)
    etas = np.asarray(dissipation_kernel(ROOM, ts), float)
    for row, t, nu, eta in zip(rows, ts, nus, etas):
        assert row[0] == pytest.approx(t, rel=1e-15)
        assert row[1] == pytest.approx(nu, rel=1e-12)
        assert row[2] == pytest.approx(eta, rel=1e-12)


def test_coth_stable():
    assert coth_stable(50.0) == pytest.approx(1.0, rel=1e-15)
    # tiny argument: 1/x dominates, next correction x/3
    x = 1e-8
    assert coth_stable(x) == pytest.approx(1.0 / x + x / 3.0, rel=1e-14)
    # agreement with an arbitrary-precision reference across the internal
    # series/direct switch near 1e-4
    import mpmath
    for x in (9e-5, 1e-4, 1.1e-4):
        assert float(coth_stable(x)) == pytest.approx(
            float(mpmath.coth(x)), rel=1e-13)
    # odd function
    assert coth_stable(-0.3) == pytest.approx(-coth_stable(0.3), rel=1e-15)
    vec = coth_stable(np.array([1e-6, 1.0, 10.0]))
    assert vec.shape == (3,)

import numpy as np
import pytest

from spinflop import (
    DenominatorSingular,
    DriveParams,
    SeriesInvalid,
    a1_series,
    a_coeffs_exact,
    branch_wrap_flags,
    consistency_report,
    disentangle,
    heisenberg_sz_oracle,
    propagator_matrix,
)

WEAK = DriveParams(omega0=1e10, gamma=1e7, omega=1e10)

# drive whose rotating-frame denominator passes within 1e-13 of zero
NEAR_SINGULAR = object.__new__(DriveParams)
for _name, _val in (("omega0", 1e-3), ("gamma", 1e10), ("omega", 0.0)):
    object.__setattr__(NEAR_SINGULAR, _name, _val)
del _name, _val


def _flip_gamma(drive: DriveParams) -> DriveParams:
    """Clone with gamma negated, bypassing the gamma >= 0 validation."""
    clone = object.__new__(DriveParams)
    object.__setattr__(clone, "omega0", drive.omega0)
    object.__setattr__(clone, "gamma", -drive.gamma)
    object.__setattr__(clone, "omega", drive.omega)
    return clone


def test_disentangle_at_zero():
    d = disentangle(WEAK, 0.0)
    assert d.f_plus == 0.0
    assert d.f_minus == 0.0
    assert d.f_z == 0.0


def test_disentangle_high_precision_point():
    # frozen from a 50-digit re-evaluation of the same closed forms
    d = disentangle(WEAK, 1e-10)
    np.testing.assert_allclose(
        d.f_plus, 0.00022984884706592857 + 0.00042073553203620561j,
        rtol=1e-12, atol=0)
    np.testing.assert_allclose(
        d.f_minus, -0.00047822460724515003 + 3.3913204516052641e-05j,
        rtol=1e-12, atol=0)
    np.testing.assert_allclose(
        d.f_z, 2.2984885400007575e-07 + 1.0000000792645147j,
        rtol=1e-12, atol=0)


def test_disentangle_conjugate_pair():
    rng = np.random.default_rng(31)
    for _ in range(50):
        omega0 = 10 ** rng.uniform(8, 11)
        drive = DriveParams(omega0=omega0,
                            gamma=omega0 * 10 ** rng.uniform(-4, -0.5),
                            omega=omega0 * rng.uniform(0.5, 1.5))
        t = rng.uniform(0.0, 20.0) / drive.k
        d = disentangle(drive, t)
        phase = np.exp(1j * drive.omega * t)
        # both raising and lowering functions share one envelope
        np.testing.assert_allclose(d.f_plus * phase, d.f_minus / phase,
                                   rtol=1e-13, atol=0)
        assert abs(d.f_plus) == pytest.approx(abs(d.f_minus), rel=1e-13)


def test_disentangle_singular_denominator():
    with pytest.raises(DenominatorSingular):
        disentangle(NEAR_SINGULAR, np.pi / NEAR_SINGULAR.k)


def test_a_coeffs_exact_at_zero():
    a = a_coeffs_exact(WEAK, 0.0)
    assert (a.a1, a.a2, a.a3) == (0.0, 0.0, 0.0)
    assert a.a4 == pytest.approx(1.0, rel=1e-15)


def test_a_coeffs_exact_half_period_value():
    # at t = pi/k the coefficient collapses to u(1-u)/(1+u), u = (gamma/omega0)^2
    drive = DriveParams(omega0=1e10, gamma=1e9, omega=1e10)
    u = (drive.gamma / drive.omega0) ** 2
    a = a_coeffs_exact(drive, np.pi / drive.k)
    assert float(a.a1) == pytest.approx(u * (1 - u) / (1 + u), rel=2.5e-12)


def test_a_coeffs_exact_singular_denominator():
    with pytest.raises(DenominatorSingular):
        a_coeffs_exact(NEAR_SINGULAR, np.pi / NEAR_SINGULAR.k)


def test_a_coeffs_parity_in_gamma():
    drive = DriveParams(omega0=1e10, gamma=3e8, omega=1.01e10)
    ts = np.linspace(0.0, 4 * np.pi / drive.k, 97)[1:]
    plus = a_coeffs_exact(drive, ts)
    minus = a_coeffs_exact(_flip_gamma(drive), ts)
    np.testing.assert_allclose(minus.a1, plus.a1, rtol=0, atol=1e-12)
    np.testing.assert_allclose(minus.a4, plus.a4, rtol=0, atol=1e-12)
    np.testing.assert_allclose(minus.a2, -np.asarray(plus.a2, float),
                               rtol=0, atol=1e-12)
    np.testing.assert_allclose(minus.a3, -np.asarray(plus.a3, float),
                               rtol=0, atol=1e-12)


def test_oracle_at_zero_and_zero_drive():
    a = heisenberg_sz_oracle(WEAK, 0.0)
    np.testing.assert_allclose((a.a1, a.a2, a.a3, a.a4), (1, 0, 0, 0),
                               atol=1e-14)
    static = DriveParams(omega0=1e10, gamma=0.0, omega=0.0)
    for t in (1e-11, 3e-10, 7e-9):
        a = heisenberg_sz_oracle(static, t)
        np.testing.assert_allclose((a.a1, a.a2, a.a3, a.a4), (1, 0, 0, 0),
                                   atol=1e-12)


def test_oracle_is_traceless_rotation():
    drive = DriveParams(omega0=1e10, gamma=2e9, omega=0.97e10)
    rng = np.random.default_rng(37)
    for t in rng.uniform(0.0, 10.0, 60) / drive.k:
        a = heisenberg_sz_oracle(drive, float(t))
        assert abs(a.a4) <= 1e-11
        norm = a.a1 ** 2 + a.a2 ** 2 + a.a3 ** 2
        assert norm == pytest.approx(1.0, abs=1e-10)


def test_propagator_matrix_examples():
    np.testing.assert_allclose(propagator_matrix(WEAK, 0.0), np.eye(2),
                               atol=1e-15)
    static = DriveParams(omega0=1e10, gamma=0.0, omega=0.0)
    t = 3e-10
    got = propagator_matrix(static, t)
    want = np.diag([np.exp(-0.5j * 1e10 * t), np.exp(0.5j * 1e10 * t)])
    np.testing.assert_allclose(got, want, atol=1e-13)
    # strong static drive: a pi rotation about x up to a tiny omega0 tilt
    strong = DriveParams(omega0=1.0, gamma=1e10, omega=0.0)
    got = propagator_matrix(strong, np.pi / strong.gamma)
    want = np.array([[0.0, -1j], [-1j, 0.0]])
    np.testing.assert_allclose(got, want, atol=1e-9)


def test_propagator_matrix_unitary():
    drive = DriveParams(omega0=1e10, gamma=4e8, omega=1.02e10)
    for t in (1e-11, 2.4e-10, 8e-10):
        u = propagator_matrix(drive, t)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-13)


def test_a1_series_basics():
    assert a1_series(WEAK, 0.0) == 0.0
    with pytest.raises(ValueError):
        a1_series(WEAK, 1e-10, order=0)
    with pytest.raises(SeriesInvalid):
        a1_series(DriveParams(omega0=1e10, gamma=1e10, omega=1e10), 1e-10)


def test_a1_series_small_coupling_absolute_error():
    drive = DriveParams(omega0=1e10, gamma=1e7, omega=1e10)
    ts = np.linspace(0.0, 2 * np.pi / drive.k, 500)
    exact = np.asarray(a_coeffs_exact(drive, ts).a1, float)
    approx = a1_series(drive, ts, order=1)
    assert np.max(np.abs(exact - approx)) <= 1e-10


def test_a1_series_order1_scaling():
    """Leading-order truncation error falls ~16x per coupling halving."""
    errs = []
    for g_rel in (8e-3, 4e-3, 2e-3):
        drive = DriveParams(omega0=1e10, gamma=g_rel * 1e10, omega=1e10)
        ts = np.linspace(0.0, 2 * np.pi / drive.k, 400)[1:]
        exact = np.asarray(a_coeffs_exact(drive, ts).a1, float)
        errs.append(np.max(np.abs(exact - a1_series(drive, ts, order=1))))
    assert errs[0] / errs[1] >= 13.0
    assert errs[1] / errs[2] >= 13.0


def test_a1_series_order2_scaling():
    """Second order gains two more powers: ~64x per halving."""
    errs = []
    for g_rel in (1.28e-1, 6.4e-2, 3.2e-2, 1.6e-2):
        drive = DriveParams(omega0=1e10, gamma=g_rel * 1e10, omega=1e10)
        ts = np.linspace(0.0, 2 * np.pi / drive.k, 400)[1:]
        exact = np.asarray(a_coeffs_exact(drive, ts).a1, float)
        errs.append(np.max(np.abs(exact - a1_series(drive, ts, order=2))))
    for lo, hi in zip(errs[1:], errs[:-1]):
        assert hi / lo >= 45.0
    # and the next order is strictly more accurate at fixed coupling
    drive = DriveParams(omega0=1e10, gamma=1.6e8, omega=1e10)
    ts = np.linspace(0.0, 2 * np.pi / drive.k, 400)[1:]
    exact = np.asarray(a_coeffs_exact(drive, ts).a1, float)
    e2 = np.max(np.abs(exact - a1_series(drive, ts, order=2)))
    e3 = np.max(np.abs(exact - a1_series(drive, ts, order=3)))
    assert e3 < e2


def test_branch_wrap_flags():
    drive = DriveParams(omega0=1e10, gamma=3e8, omega=1.01e10)
    period = 2 * np.pi / drive.k
    fine = np.linspace(0.0, period, 400)
    flags = branch_wrap_flags(drive, fine)
    assert flags.dtype == np.bool_
    assert len(flags) == len(fine) - 1
    assert not flags.any()
    straddle = np.array([0.9 * period, 1.1 * period])
    assert branch_wrap_flags(drive, straddle).any()


def test_consistency_report_time_zero_disagreement():
    # the closed coefficients start at (0,0,0,1), the propagator oracle
    # at (1,0,0,0); the report must preserve that unit disagreement
    rep = consistency_report(WEAK, np.array([0.0]))
    np.testing.assert_allclose(rep.max_abs_diff, [1.0, 0.0, 0.0, 1.0],
                               atol=1e-14)
    assert rep.printed.shape == (1, 4)
    assert rep.oracle.shape == (1, 4)


def test_consistency_report_zero_drive_transverse_agreement():
    static = DriveParams(omega0=1e10, gamma=0.0, omega=0.0)
    ts = np.linspace(0.0, 1e-9, 40)
    rep = consistency_report(static, ts)
    diffs = rep.diffs
    np.testing.assert_allclose(diffs[:, 1], 0.0, atol=1e-14)
    np.testing.assert_allclose(diffs[:, 2], 0.0, atol=1e-14)


def test_consistency_report_csv():
    ts = np.linspace(0.0, 1e-9, 100)
    rep = consistency_report(WEAK, ts)
    assert np.all(np.isfinite(rep.printed))
    assert np.all(np.isfinite(rep.oracle))
    text = rep.to_csv_text()
    lines = text.strip().split("\n")
    assert lines[0].split(",") == [
        "t",
        "a1_printed", "a2_printed", "a3_printed", "a4_printed",
        "a1_oracle", "a2_oracle", "a3_oracle", "a4_oracle",
        "d1", "d2", "d3", "d4",
    ]
    assert len(lines) == 101
    assert all(len(line.split(",")) == 13 for line in lines[1:])
    short = rep.to_csv_text(precision=6).strip().split("\n")[1]
    assert max(len(cell) for cell in short.split(",")) <= 13

"""Dephasing-rate routes for the driven spin in the ohmic bath.

The central quantity is the decoherence factor

    D = (1/4) int_0^inf a1(t) nu(t) dt        [units 1/s]

with a1 the sigma_z coefficient of the Heisenberg-picture spin operator and
nu the bath noise kernel. Four routes are implemented and kept independent
so they can check each other:

* dfactor_quadrature    - direct numerical integration (any coth mode),
* dfactor_closed_high_t - closed high-temperature form
                          pi kB T gamma^2 / (8 hbar omega0^2) (1 - e^{-k/lam}),
* dfactor_series_t      - finite-temperature bracket 1 - e^{-k/lam} x coth x
                          with x coth x summed as a truncated series,
* dfactor_higher_order  - next order in (gamma/omega0)^2, carried over
                          verbatim (cosh-weighted bracket); report-only.

The quadrature route splits a1 into its period mean plus an oscillatory
remainder: the mean part integrates against nu exactly (int_0^inf nu dt =
pi kB T / hbar for every coth treatment), and only the zero-mean remainder
is integrated numerically, which keeps the Lorentzian 1/t^2 tail from
polluting the truncated integral. With the exact coth the time integral is
only conditionally convergent, so a convergence factor e^{-eps k t} is
inserted and the eps -> 0 limit is taken by extrapolation in the basis
{1, eps ln eps, eps} (the log term is what a conditionally convergent
Lorentzian tail produces; plain power-law extrapolation stalls).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import CONSTANTS, BathParams, DriveParams, PhysicalConstants
from .errors import SeriesInvalid
from .kernels import (DEFAULT_QUADRATURE, QuadratureSettings, _series_coefficients,
                      coth_stable, dissipation_kernel, noise_kernel_grid)
from .propagator import a1_series, a_coeffs_exact

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)

DEFAULT_EPSILON_LIST = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class A1Mode:
    """Which a1(t) goes into the quadrature: truncated series or closed form."""

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("series", "exact"):
            raise ValueError(f"unknown a1 mode {self.kind!r}")
        if self.kind == "series" and self.order < 1:
            raise ValueError(f"series order must be >= 1, got {self.order}")
        if self.kind == "exact" and self.order != 0:
            raise ValueError("order is only meaningful for series mode")

    @classmethod
    def series(cls, order: int) -> "A1Mode":
        return cls("series", order)

    @classmethod
    def exact(cls) -> "A1Mode":
        return cls("exact")


@dataclass(frozen=True)
class DecoherenceResult:
    d_factor: float            # 1/s
    method: str                # Quadrature | ClosedHighT | SeriesT | HigherOrder
    error_estimate: float = 0.0
    negative_d_factor: bool = False


@dataclass(frozen=True)
class GFunctions:
    """Truncated series of x coth x and of its doubled-argument companion."""

    g: float
    g_prime: float
    x: float                   # hbar k / (2 kB T)


@dataclass(frozen=True)
class SuperopCoefficients:
    """Constant coefficients of the reduced-evolution generator.

    shift_* renormalize the Hamiltonian (signs applied where the generator
    is assembled); kappa_y and kappa_x weight the sigma_y/sigma_x sandwich
    terms and are complex because they integrate zeta = nu + i eta.
    """

    shift_z: float
    shift_x: float
    shift_y: float
    kappa_x: complex
    kappa_y: complex


def _require_weak_drive(drive: DriveParams, what: str) -> None:
    if not drive.gamma < drive.omega0:
        raise ValueError(f"{what} requires gamma < omega0 "
                         f"(got gamma = {drive.gamma}, omega0 = {drive.omega0})")


def _panel_quad(f, edges: np.ndarray) -> tuple[float, float]:
    """Vectorized fixed-order Gauss quadrature over contiguous panels.

    Returns (value, error_proxy) where the proxy is the 16- vs 8-node
    difference accumulated over panels.
    """
    a = edges[:-1]
    b = edges[1:]
    mid = (a + b) / 2
    half = (b - a) / 2
    t16 = (mid[:, None] + half[:, None] * _GL16_X[None, :]).ravel()
    w16 = (half[:, None] * _GL16_W[None, :]).ravel()
    v16 = float(np.dot(f(t16), w16))
    t8 = (mid[:, None] + half[:, None] * _GL8_X[None, :]).ravel()
    w8 = (half[:, None] * _GL8_W[None, :]).ravel()
    v8 = float(np.dot(f(t8), w8))
    return v16, abs(v16 - v8)


def _period_mean(f, period: float) -> float:
    edges = np.linspace(0.0, period, 65)
    val, _ = _panel_quad(f, edges)
    return val / period


def _zero_mean_bound(f, mean: float, period: float) -> float:
    """Max over one period of |int_0^t (f - mean)|, for tail bounds."""
    n = 512
    ts = np.linspace(0.0, period, n + 1)
    y = f(ts) - mean
    cum = np.cumsum((y[:-1] + y[1:]) / 2) * (period / n)
    return float(np.max(np.abs(cum)))


def _a1_callable(drive: DriveParams, mode: A1Mode):
    if mode.kind == "exact":
        return lambda t: a_coeffs_exact(drive, t).a1
    return lambda t: a1_series(drive, t, order=mode.order)


def _half_period_edges(period: float, t_upper: float) -> np.ndarray:
    n = int(math.ceil(t_upper / (period / 2)))
    return np.arange(n + 1) * (period / 2)


def _t_upper(drive: DriveParams, bath: BathParams,
             settings: QuadratureSettings) -> float:
    lam = bath.cutoff
    k = drive.k
    return settings.omega_upper_factor / min(lam, k) * (1 + lam / k)


def dfactor_quadrature(drive: DriveParams, bath: BathParams,
                       a1_mode: A1Mode = A1Mode.series(1),
                       settings: QuadratureSettings = DEFAULT_QUADRATURE,
                       epsilon_list=DEFAULT_EPSILON_LIST,
                       constants: PhysicalConstants = CONSTANTS) -> DecoherenceResult:
    """Quadrature of (1/4) int a1 nu dt; coth treatment taken from the bath.

    For the exact coth the integral is regularized by e^{-eps k t} for each
    eps in epsilon_list and extrapolated to eps = 0; error_estimate is the
    distance between the extrapolated value and the plain two-point linear
    limit (the leading neglected term).
    """
    _require_weak_drive(drive, "dfactor_quadrature")
    if drive.gamma == 0.0:
        return DecoherenceResult(0.0, "Quadrature", 0.0)
    if bath.coth_mode.kind == "exact":
        return _dfactor_quad_exact(drive, bath, settings, a1_mode,
                                   epsilon_list, constants)
    return _dfactor_quad_absolute(drive, bath, settings, a1_mode, constants)


def _dfactor_quad_absolute(drive, bath, settings, a1_mode, constants):
    """high_t / series coth modes: absolutely integrable after mean removal."""
    k = drive.k
    period = 2 * math.pi / k
    a1 = _a1_callable(drive, a1_mode)
    abar = _period_mean(a1, period)
    nu = lambda ts: noise_kernel_grid(bath, ts, constants)
    edges = _half_period_edges(period, _t_upper(drive, bath, settings))
    t_up = edges[-1]
    osc, quad_err = _panel_quad(lambda ts: (a1(ts) - abar) * nu(ts), edges)
    dc = abar * math.pi * bath.thermal_energy(constants) / constants.hbar
    m_bound = _zero_mean_bound(a1, abar, period)
    tail = 2 * m_bound * float(nu(np.array([t_up]))[0])
    return DecoherenceResult(0.25 * (dc + osc), "Quadrature",
                             0.25 * (quad_err + tail))


def _dfactor_quad_exact(drive, bath, settings, a1_mode, epsilon_list, constants):
    """Exact coth: eps-regularized integral, extrapolated to eps = 0."""
    k = drive.k
    lam = bath.cutoff
    period = 2 * math.pi / k
    a1 = _a1_callable(drive, a1_mode)
    abar = _period_mean(a1, period)
    nu = lambda ts: noise_kernel_grid(bath, ts, constants)
    kbt = bath.thermal_energy(constants)
    xfac = constants.hbar / (2 * kbt)

    def f_omega(w):
        return w * math.exp(-w / lam) * coth_stable(xfac * w)

    eps_arr = np.asarray(sorted(epsilon_list, reverse=True), dtype=float)
    if len(eps_arr) < 3:
        raise ValueError("need at least three epsilon values to extrapolate")
    vals = []
    for eps in eps_arr:
        s = eps * k
        # DC part in the omega domain: the regulator turns int a1bar nu dt
        # into a Lorentzian average of the spectral function
        split = min(20 * s, settings.omega_upper_factor * lam / 2)
        dc1, _ = integrate.quad(lambda w: f_omega(w) * s / (s * s + w * w),
                                0.0, split, limit=400,
                                epsrel=settings.rel_tol)
        dc2, _ = integrate.quad(lambda w: f_omega(w) * s / (s * s + w * w),
                                split, settings.omega_upper_factor * lam,
                                limit=400, epsrel=settings.rel_tol)
        t2 = min(40.0 / s, 100 * _t_upper(drive, bath, settings))
        edges = _half_period_edges(period, t2)
        osc, _ = _panel_quad(
            lambda ts: (a1(ts) - abar) * nu(ts) * np.exp(-s * ts), edges)
        vals.append(0.25 * (abar * (dc1 + dc2) + osc))
    vals = np.asarray(vals)
    # leading truncation error of the regulator is O(eps ln eps) + O(eps)
    basis = np.column_stack([np.ones_like(eps_arr),
                             eps_arr * np.log(eps_arr), eps_arr])
    coef = np.linalg.solve(basis, vals)
    lin_basis = np.column_stack([np.ones(2), eps_arr[1:]])
    lin = np.linalg.solve(lin_basis, vals[1:])[0]
    d0 = float(coef[0])
    return DecoherenceResult(d0, "Quadrature", abs(d0 - float(lin)))


def dfactor_closed_high_t(drive: DriveParams, bath: BathParams,
                          constants: PhysicalConstants = CONSTANTS) -> DecoherenceResult:
    """Closed high-T form pi kB T gamma^2/(8 hbar omega0^2) (1 - e^{-k/lam})."""
    _require_weak_drive(drive, "dfactor_closed_high_t")
    kbt = bath.thermal_energy(constants)
    base = math.pi * kbt * drive.gamma ** 2 / (8 * constants.hbar * drive.omega0 ** 2)
    bracket = 1.0 - math.exp(-drive.k / bath.cutoff)
    return DecoherenceResult(base * bracket, "ClosedHighT")


def g_series(x: float, order: int = 10) -> float:
    """Truncated Taylor series of g(x) = x coth x; valid for |x| < pi."""
    if not 1 <= order <= 20:
        raise ValueError(f"order must be in 1..20, got {order}")
    if not abs(x) < math.pi:
        raise SeriesInvalid(f"|x| = {abs(x):.3g} outside the radius pi")
    coeffs = _series_coefficients(order)
    x2 = x * x
    acc = 1.0
    p = x2
    for c in coeffs:
        acc += c * p
        p *= x2
    return acc


def thermal_argument(drive: DriveParams, bath: BathParams,
                     constants: PhysicalConstants = CONSTANTS) -> float:
    """x = hbar k / (2 kB T)."""
    return constants.hbar * drive.k / (2 * bath.thermal_energy(constants))


def g_functions(bath: BathParams, k: float, order: int = 10,
                constants: PhysicalConstants = CONSTANTS) -> GFunctions:
    """g and g_prime at x = hbar k / (2 kB T).

    g_prime is the same series evaluated at 2x (the doubled powers of two
    in its printed coefficients), so it needs the tighter radius x < pi/2;
    SeriesInvalid marks whichever series would run outside its radius.
    """
    x = constants.hbar * k / (2 * bath.thermal_energy(constants))
    return GFunctions(g=g_series(x, order), g_prime=g_series(2 * x, order), x=x)


def dfactor_series_t(drive: DriveParams, bath: BathParams, order: int = 10,
                     constants: PhysicalConstants = CONSTANTS) -> DecoherenceResult:
    """Finite-temperature bracket: D = base * (1 - e^{-k/lam} g(x)).

    The bracket can go non-positive at low temperature and weak cutoff;
    that is flagged (negative_d_factor), not raised.
    """
    _require_weak_drive(drive, "dfactor_series_t")
    if drive.gamma == 0.0:
        return DecoherenceResult(0.0, "SeriesT")
    x = thermal_argument(drive, bath, constants)
    g = g_series(x, order)
    kbt = bath.thermal_energy(constants)
    base = math.pi * kbt * drive.gamma ** 2 / (8 * constants.hbar * drive.omega0 ** 2)
    bracket = 1.0 - math.exp(-drive.k / bath.cutoff) * g
    return DecoherenceResult(base * bracket, "SeriesT",
                             negative_d_factor=bracket <= 0.0)


def dfactor_higher_order(drive: DriveParams, bath: BathParams,
                         gamma_order: int = 2, g_order: int = 10,
                         constants: PhysicalConstants = CONSTANTS) -> DecoherenceResult:
    """Next orders in u = (gamma/omega0)^2, carried over verbatim.

    D = (pi kB T / 8 hbar) [ S1 (1 - e^{-k/lam} g)
                            + S2 ( cosh(2k/lam) g'/4 - cosh(k/lam) g + 3/4 ) ]
    with S1 = u - u^2 + ..., S2 = u^2 - u^3 + ... truncated at gamma_order.
    The cosh-weighted second bracket grows with k/lam instead of saturating;
    this route is for reporting its deviation from quadrature, not for
    asserting agreement.
    """
    if gamma_order < 1:
        raise ValueError(f"gamma_order must be >= 1, got {gamma_order}")
    _require_weak_drive(drive, "dfactor_higher_order")
    if drive.gamma == 0.0:
        return DecoherenceResult(0.0, "HigherOrder")
    gf = g_functions(bath, drive.k, g_order, constants)
    u = (drive.gamma / drive.omega0) ** 2
    s_one = 0.0
    s_two = 0.0
    for n in range(1, gamma_order + 1):
        term = (-1.0) ** (n - 1) * u ** n
        s_one += term
        if n >= 2:
            s_two -= term
    klam = drive.k / bath.cutoff
    kbt = bath.thermal_energy(constants)
    first = s_one * (1.0 - math.exp(-klam) * gf.g)
    second = s_two * (0.25 * math.cosh(2 * klam) * gf.g_prime
                      - math.cosh(klam) * gf.g + 0.75)
    d = math.pi * kbt / (8 * constants.hbar) * (first + second)
    return DecoherenceResult(d, "HigherOrder")


def _oscillatory_integral(fn, drive: DriveParams, bath: BathParams,
                          settings: QuadratureSettings, t_scale: float = 100.0):
    """int_0^T fn(t) dt with T ~ t_scale * the base truncation horizon.

    Panels are half periods of the fastest frequency present (omega + k).
    Used for the mixed-frequency shift/kappa integrands, whose quasi-static
    beat component decays with the kernel itself.
    """
    k = drive.k
    fast = max(drive.omega + k, k)
    period = 2 * math.pi / fast
    t_up = t_scale * _t_upper(drive, bath, settings)
    edges = _half_period_edges(period, t_up)
    val, err = _panel_quad(fn, edges)
    return val, err, edges[-1]


def superop_coefficients(drive: DriveParams, bath: BathParams,
                         settings: QuadratureSettings = DEFAULT_QUADRATURE,
                         constants: PhysicalConstants = CONSTANTS) -> SuperopCoefficients:
    """Generator coefficients from the closed-form a-coefficients.

    shift_z  =       int a4(t) nu(t) dt
    shift_x  =       int a3(-t) nu(t) dt
    shift_y  =       int a2(-t) nu(t) dt
    kappa_y  = (1/4) int a3(-t) zeta(t) dt,    zeta = nu + i eta
    kappa_x  = (1/4) int a2(-t) zeta(t) dt

    nu follows bath.coth_mode (high_t by default). a4 is periodic, so its
    period mean integrates against nu exactly; the mixed-frequency a2/a3
    integrands are truncated once the kernel tail is negligible. a(-t) is
    literal substitution into the printed closed forms.
    """
    _require_weak_drive(drive, "superop_coefficients")
    k = drive.k
    period = 2 * math.pi / k
    nu = lambda ts: noise_kernel_grid(bath, ts, constants)
    a4 = lambda ts: a_coeffs_exact(drive, ts).a4
    a4bar = _period_mean(a4, period)
    edges = _half_period_edges(period, _t_upper(drive, bath, settings))
    osc, _ = _panel_quad(lambda ts: (a4(ts) - a4bar) * nu(ts), edges)
    shift_z = a4bar * math.pi * bath.thermal_energy(constants) / constants.hbar + osc

    if drive.gamma == 0.0:
        return SuperopCoefficients(shift_z=shift_z, shift_x=0.0, shift_y=0.0,
                                   kappa_x=0j, kappa_y=0j)

    def a2_neg(ts):
        return a_coeffs_exact(drive, -ts).a2

    def a3_neg(ts):
        return a_coeffs_exact(drive, -ts).a3

    shift_x, _, _ = _oscillatory_integral(lambda ts: a3_neg(ts) * nu(ts),
                                          drive, bath, settings)
    shift_y, _, _ = _oscillatory_integral(lambda ts: a2_neg(ts) * nu(ts),
                                          drive, bath, settings)
    eta = lambda ts: dissipation_kernel(bath, ts)
    ky_im, _, _ = _oscillatory_integral(lambda ts: a3_neg(ts) * eta(ts),
                                        drive, bath, settings)
    kx_im, _, _ = _oscillatory_integral(lambda ts: a2_neg(ts) * eta(ts),
                                        drive, bath, settings)
    # Re kappa_y shares its integrand with shift_x (likewise kappa_x, shift_y)
    return SuperopCoefficients(
        shift_z=shift_z,
        shift_x=shift_x,
        shift_y=shift_y,
        kappa_x=0.25 * complex(shift_y, kx_im),
        kappa_y=0.25 * complex(shift_x, ky_im),
    )


_DFACTOR_HEADER = ("method", "omega0", "gamma", "omega", "T", "lambda",
                   "d_factor", "error_estimate")


def dfactor_table(drive: DriveParams, bath: BathParams,
                  settings: QuadratureSettings = DEFAULT_QUADRATURE,
                  a1_mode: A1Mode = A1Mode.series(1),
                  epsilon_list=DEFAULT_EPSILON_LIST,
                  constants: PhysicalConstants = CONSTANTS):
    """All four routes side by side, as rows for the CSV table."""
    results = [
        dfactor_quadrature(drive, bath, a1_mode, settings, epsilon_list,
                           constants),
        dfactor_closed_high_t(drive, bath, constants),
        dfactor_series_t(drive, bath, constants=constants),
        dfactor_higher_order(drive, bath, constants=constants),
    ]
    rows = [(r.method, drive.omega0, drive.gamma, drive.omega,
             bath.temperature, bath.cutoff, r.d_factor, r.error_estimate)
            for r in results]
    return _DFACTOR_HEADER, rows

"""Ohmic bath spectral density and its time-domain correlation kernels.

The bath is ohmic with an exponential cutoff, J(omega) = omega e^{-omega/cutoff}
(angular frequencies throughout). The real noise kernel is

    nu(t) = int_0^inf J(w) coth(hbar w / 2 kB T) cos(w t) dw

and the dissipation kernel is

    eta(t) = int_0^inf J(w) sin(w t) dw = 2 cutoff^3 t / (1 + cutoff^2 t^2)^2.

Three treatments of the coth factor are supported: the classical high-T
replacement coth(x) -> 1/x (closed Lorentzian form), a truncated Taylor
expansion of coth integrated term by term (closed forms again), and the
exact factor integrated numerically. An analytic evaluation of the exact
case via the complex trigamma function is provided for dense time grids
where per-point quadrature is not affordable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import bernoulli

from .core import CONSTANTS, BathParams, PhysicalConstants
from .errors import QuadratureFailure, SeriesInvalid


@dataclass(frozen=True)
class QuadratureSettings:
    """Budget and tolerances for the semi-infinite quadratures.

    abs_tol is interpreted relative to the scale of the integrand (it is
    multiplied by the caller-supplied scale estimate before use).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    omega_upper_factor: float = 40.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.omega_upper_factor < 20:
            raise ValueError("omega_upper_factor below 20 would leave a "
                             "non-negligible truncation tail")


DEFAULT_QUADRATURE = QuadratureSettings()


def spectral_density(bath: BathParams, omega):
    """J(omega) = omega * exp(-omega/cutoff) for omega >= 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral density is defined for omega >= 0")
    out = omega * np.exp(-omega / bath.cutoff)
    return float(out) if out.ndim == 0 else out


def coth_stable(x):
    """coth(x) with the small-argument series below |x| = 1e-4."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0,
                   1.0 / np.tanh(safe))
    return float(out) if out.ndim == 0 else out


def quad_semi_infinite(integrand, settings: QuadratureSettings = DEFAULT_QUADRATURE,
                       oscillation_period: float | None = None,
                       decay_scale: float = 1.0) -> tuple[float, float]:
    """Integrate integrand(x) over [0, inf) assuming exponential decay.

    The integral is truncated at upper = omega_upper_factor * decay_scale and
    evaluated by adaptive Gauss-Kronrod quadrature on panels. When
    oscillation_period is given, panel boundaries are aligned to half periods
    so no panel straddles a sign change of the oscillatory factor. A tail
    bound |integrand(upper)| * decay_scale is added to the returned error
    estimate.

    Returns (value, error_estimate). Raises QuadratureFailure when the panel
    budget (max_subdivisions) is exceeded or the panel quadrature reports
    non-convergence.
    """
    upper = settings.omega_upper_factor * decay_scale
    if oscillation_period is not None and oscillation_period > 0:
        half = oscillation_period / 2
        n_panels = int(math.ceil(upper / half))
        if n_panels > settings.max_subdivisions:
            raise QuadratureFailure(
                f"{n_panels} half-period panels exceed the budget of "
                f"{settings.max_subdivisions}")
        edges = np.minimum(np.arange(n_panels + 1) * half, upper)
    else:
        n_panels = 64
        edges = np.linspace(0.0, upper, n_panels + 1)

    # probe the integrand scale for the absolute tolerance
    probe = max(abs(float(integrand(upper * f))) for f in (1e-6, 0.05, 0.25, 1.0))
    abs_tol = settings.abs_tol * max(probe, 1e-300) * max(upper, 1.0)

    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        try:
            v, e = integrate.quad(integrand, a, b, limit=50,
                                  epsabs=abs_tol / max(n_panels, 1),
                                  epsrel=settings.rel_tol)
        except Exception as exc:  # pragma: no cover - scipy internal failure
            raise QuadratureFailure(f"panel [{a!r}, {b!r}] failed: {exc}") from exc
        total += v
        err += abs(e)
    tail = abs(float(integrand(upper))) * decay_scale
    err += tail
    if err > max(abs(total) * max(settings.rel_tol, 1e-6) * 1e3, abs_tol * 1e6, tail * 4):
        raise QuadratureFailure(
            f"error estimate {err:.3g} too large for value {total:.3g}")
    return total, err


def _series_coefficients(order: int) -> np.ndarray:
    """c_n = 2^{2n} B_{2n} / (2n)! for n = 1..order (coth Taylor weights)."""
    b = bernoulli(2 * order)
    out = np.empty(order)
    for n in range(1, order + 1):
        out[n - 1] = (4.0 ** n) * b[2 * n] / math.factorial(2 * n)
    return out


def noise_kernel(bath: BathParams, t, constants: PhysicalConstants = CONSTANTS,
                 settings: QuadratureSettings = DEFAULT_QUADRATURE):
    """Real noise kernel nu(t), dispatched on bath.coth_mode.

    high_t : closed form (2 kB T / hbar) * cutoff / (1 + cutoff^2 t^2).
    series : coth Taylor series integrated term by term (closed forms);
             raises SeriesInvalid when hbar*omega_upper/(2 kB T) >= pi with
             omega_upper = omega_upper_factor * cutoff, i.e. when the
             expansion would be summed outside its convergence radius
             inside the integration range.
    exact  : panel quadrature of the defining integral (scalar t only).

    Scalar t gives a float; array t is supported for the closed-form modes.
    """
    lam = bath.cutoff
    kbt = bath.thermal_energy(constants)
    mode = bath.coth_mode.kind
    if mode == "high_t":
        t = np.asarray(t, dtype=float)
        out = (2 * kbt / constants.hbar) * lam / (1 + (lam * t) ** 2)
        return float(out) if out.ndim == 0 else out
    if mode == "series":
        x_upper = constants.hbar * (settings.omega_upper_factor * lam) / (2 * kbt)
        if x_upper >= math.pi:
            raise SeriesInvalid(
                f"coth series outside its radius: hbar*omega_upper/2kBT = "
                f"{x_upper:.3g} >= pi")
        t = np.asarray(t, dtype=float)
        z = 1 / lam - 1j * t
        # int_0^inf w^{2n} e^{-w/lam} cos(wt) dw = Re[(2n)!/z^{2n+1}]
        acc = np.real(1 / z)
        coeffs = _series_coefficients(bath.coth_mode.order)
        xfac = constants.hbar / (2 * kbt)
        zp = z ** 3
        for n, c in enumerate(coeffs, start=1):
            acc = acc + c * xfac ** (2 * n) * math.factorial(2 * n) * np.real(1 / zp)
            zp = zp * z * z
        out = (2 * kbt / constants.hbar) * acc
        return float(out) if out.ndim == 0 else out
    # exact: quadrature
    tf = float(t)
    xfac = constants.hbar / (2 * kbt)

    def f(w):
        return w * math.exp(-w / lam) * coth_stable(xfac * w) * math.cos(w * tf)

    period = 2 * math.pi / abs(tf) if tf != 0.0 else None
    value, _ = quad_semi_infinite(f, settings, oscillation_period=period,
                                  decay_scale=lam)
    return value


def dissipation_kernel(bath: BathParams, t,
                       settings: QuadratureSettings = DEFAULT_QUADRATURE):
    """eta(t) = 2 cutoff^3 t / (1 + cutoff^2 t^2)^2 (temperature independent).

    The closed form is exact for this spectral density; `settings` is
    accepted for interface symmetry with noise_kernel (tests cross-check
    the closed form against quad_semi_infinite directly).
    """
    lam = bath.cutoff
    t = np.asarray(t, dtype=float)
    out = 2 * lam ** 3 * t / (1 + (lam * t) ** 2) ** 2
    return float(out) if out.ndim == 0 else out


def _complex_trigamma(z: np.ndarray) -> np.ndarray:
    """psi'(z) for complex z with Re z > 0: recurrence into the asymptotic zone."""
    z = np.array(z, dtype=complex, copy=True)
    acc = np.zeros_like(z)
    for _ in range(40):
        mask = np.abs(z) < 30.0
        if not mask.any():
            break
        acc[mask] += 1.0 / (z[mask] * z[mask])
        z[mask] += 1.0
    # asymptotic: 1/z + 1/(2 z^2) + sum_n B_{2n} / z^{2n+1}
    res = 1.0 / z + 0.5 / (z * z)
    zp = z ** 3
    for b in (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6):
        res += b / zp
        zp *= z * z
    return acc + res


def noise_kernel_exact_analytic(bath: BathParams, t,
                                constants: PhysicalConstants = CONSTANTS):
    """Exact-coth nu(t) via nu = Re[1/z^2 + psi'(1 + z/(2c)) / (2 c^2)].

    Here z = 1/cutoff - i t and c = hbar/(2 kB T). Algebraically identical
    to the defining integral (geometric expansion of coth in e^{-2ncw},
    integrated term by term and resummed); used for dense time grids.
    Vectorized over t.
    """
    c = constants.hbar / (2 * bath.thermal_energy(constants))
    t = np.asarray(t, dtype=float)
    z = 1 / bath.cutoff - 1j * t
    val = 1 / (z * z) + _complex_trigamma(1 + z / (2 * c)) / (2 * c * c)
    out = val.real
    return float(out) if out.ndim == 0 else out


def noise_kernel_grid(bath: BathParams, t, constants: PhysicalConstants = CONSTANTS):
    """nu(t) on an array of times using closed/analytic forms only.

    Dispatches like noise_kernel but maps the exact mode to the trigamma
    evaluation so large grids stay cheap.
    """
    if bath.coth_mode.kind == "exact":
        return noise_kernel_exact_analytic(bath, t, constants)
    return noise_kernel(bath, t, constants)


_KERNEL_HEADER = ("t", "nu", "eta")


def kernel_table(bath: BathParams, t_grid,
                 constants: PhysicalConstants = CONSTANTS):
    """Rows (t, nu, eta) over a time grid, for serialization."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    nu = noise_kernel_grid(bath, t_grid, constants)
    eta = dissipation_kernel(bath, t_grid)
    return [(float(t), float(n), float(e)) for t, n, e in zip(t_grid, nu, eta)]

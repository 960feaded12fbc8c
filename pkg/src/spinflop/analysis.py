"""Retrieval time vs dephasing time across drive strength and cutoff.

The figure-of-merit is ratio = tau_d / tau with tau = 2 pi / gamma the
retrieval period and tau_d = 1/D the dephasing timescale (the stricter
1/(4D) coherence e-folding time is carried in the serialized table). In
the high-temperature closed form the ratio collapses to

    ratio = (4 hbar omega0 / pi^2 kB T) (omega0 / gamma) / (1 - e^{-k/lam}),

monotone decreasing in k/lam, so each curve crosses ratio = 1 at most once.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, BathParams, CothMode, DriveParams, PhysicalConstants
from .decoherence import dfactor_closed_high_t
from .errors import NumericalError, ZeroDrive
from .rabi import retrieval_period

DEFAULT_CURVES = (10.0, 100.0, 1000.0)
DEFAULT_TEMPERATURE = 300.0
DEFAULT_OMEGA0 = 1e10

FIGURE1_HEADER = ("curve_omega0_over_gamma", "k_over_lambda", "d_factor_per_s",
                  "tau_d_s", "tau_s", "ratio", "tau_d_strict_s")


@dataclass(frozen=True)
class RatioPoint:
    omega0_over_gamma: float
    k_over_lambda: float
    temperature: float      # K
    omega0: float           # rad/s
    d_factor: float         # 1/s
    tau_d: float            # 1/d_factor, s
    tau: float              # 2 pi / gamma, s
    ratio: float            # tau_d / tau


def ratio_prefactor(omega0: float, temperature: float,
                    constants: PhysicalConstants = CONSTANTS) -> float:
    """4 hbar omega0 / (pi^2 kB T), the small parameter of the ratio."""
    return (4 * constants.hbar * omega0
            / (math.pi ** 2 * constants.k_boltzmann * temperature))


def ratio_closed(drive: DriveParams, bath: BathParams,
                 constants: PhysicalConstants = CONSTANTS) -> RatioPoint:
    """tau_d / tau by the collapsed formula, cross-checked against 1/(D tau).

    The two routes are algebraically identical; a relative disagreement
    beyond 1e-12 means one of them was edited and is raised, not silently
    reconciled.
    """
    if drive.gamma == 0.0:
        raise ZeroDrive("ratio undefined at gamma = 0 (no retrieval period)")
    klam = drive.k / bath.cutoff
    bracket = 1.0 - math.exp(-klam)
    direct = (ratio_prefactor(drive.omega0, bath.temperature, constants)
              * (drive.omega0 / drive.gamma) / bracket)
    d = dfactor_closed_high_t(drive, bath, constants).d_factor
    tau = retrieval_period(drive).tau
    tau_d = 1.0 / d
    via_d = tau_d / tau
    if abs(direct - via_d) > 1e-12 * abs(direct):
        raise NumericalError(
            f"ratio routes disagree: {direct!r} vs {via_d!r}")
    return RatioPoint(omega0_over_gamma=drive.omega0 / drive.gamma,
                      k_over_lambda=klam,
                      temperature=bath.temperature,
                      omega0=drive.omega0,
                      d_factor=d, tau_d=tau_d, tau=tau, ratio=via_d)


def _point(omega0: float, temperature: float, curve_ratio: float,
           klam: float, constants: PhysicalConstants) -> RatioPoint:
    gamma = omega0 / curve_ratio
    drive = DriveParams(omega0=omega0, gamma=gamma, omega=omega0)
    bath = BathParams(temperature=temperature, cutoff=drive.k / klam,
                      coth_mode=CothMode.high_t())
    return ratio_closed(drive, bath, constants)


def default_k_over_lambda_grid(n_points: int = 200, lo: float = 0.01,
                               hi: float = 10.0) -> np.ndarray:
    """Log-spaced cutoff grid; the divergence at k/lam -> 0 stays excluded."""
    return np.geomspace(lo, hi, n_points)


def sweep_figure1(omega0: float = DEFAULT_OMEGA0,
                  temperature: float = DEFAULT_TEMPERATURE,
                  omega0_over_gamma_list=DEFAULT_CURVES,
                  k_over_lambda_grid=None,
                  max_workers: int = 1,
                  constants: PhysicalConstants = CONSTANTS) -> list[RatioPoint]:
    """Ratio table over (curve, cutoff) pairs, ordered by (curve, grid index)."""
    if k_over_lambda_grid is None:
        k_over_lambda_grid = default_k_over_lambda_grid()
    klams = [float(x) for x in np.asarray(k_over_lambda_grid, dtype=float)]
    curves = [float(c) for c in omega0_over_gamma_list]
    if not curves or not klams:
        raise ValueError("curve list and cutoff grid must be non-empty")
    if min(klams) <= 0:
        raise ValueError("k/lambda values must be positive")
    tasks = [(c, x) for c in curves for x in klams]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(
                lambda cx: _point(omega0, temperature, cx[0], cx[1], constants),
                tasks))
    return [_point(omega0, temperature, c, x, constants) for c, x in tasks]


def crossing_point(omega0_over_gamma: float,
                   omega0: float = DEFAULT_OMEGA0,
                   temperature: float = DEFAULT_TEMPERATURE,
                   lo: float = 1e-6, hi: float = 50.0, tol: float = 1e-10,
                   constants: PhysicalConstants = CONSTANTS) -> float | None:
    """k/lambda where the curve crosses ratio = 1; None if it never does.

    The ratio is strictly decreasing in k/lambda, so bisection on
    [lo, hi] finds the unique root when the endpoint values bracket 1.
    Below the crossing the ratio exceeds 1 (retrieval survives), above it
    dephasing wins.
    """
    if omega0_over_gamma <= 0 or omega0 <= 0 or temperature <= 0:
        raise ValueError("arguments must be positive")
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    def f(klam: float) -> float:
        return _point(omega0, temperature, omega0_over_gamma, klam,
                      constants).ratio - 1.0

    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo < 0 or f_hi > 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def figure1_rows(points: list[RatioPoint]):
    """CSV rows; the strict 1/(4D) timescale is derived at serialization."""
    for p in points:
        yield (p.omega0_over_gamma, p.k_over_lambda, p.d_factor,
               p.tau_d, p.tau, p.ratio, p.tau_d / 4.0)

"""Propagator coefficients for the rotating drive.

Two routes to the Heisenberg-picture expansion
U(t)^dag sigma_z U(t) = a1 sigma_z + a2 sigma_x + a3 sigma_y + a4 I:

* closed trigonometric forms carried over verbatim from the disentangled
  propagator algebra (`a_coeffs_exact`, `a1_series`), and
* a direct unitary-conjugation oracle built from the matrix exponential
  (`heisenberg_sz_oracle`).

The two disagree by design at finite drive: the carried-over closed forms
inherit algebra slips (a4 != 0, a1(0) = 0) that `consistency_report`
quantifies rather than repairs.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._tables import render_csv, write_csv
from .core import DriveParams, decompose_pauli, expm_su2, pauli_basis
from .errors import DenominatorSingular, SeriesInvalid

_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class DisentanglingFunctions:
    f_plus: complex
    f_minus: complex
    f_z: complex


class ACoefficients(NamedTuple):
    """Coefficients of sigma_z(t) = a1 sz + a2 sx + a3 sy + a4 I.

    Entries are floats for scalar t and arrays for grid evaluation.
    """

    a1: object
    a2: object
    a3: object
    a4: object


def disentangle(drive: DriveParams, t: float) -> DisentanglingFunctions:
    """Scalar factors of the normal-ordered propagator split.

    f_plus  = i gamma e^{-i omega t}/k * sin(kt/2)/den
    f_minus = i gamma e^{+i omega t}/k * sin(kt/2)/den
    f_z     = -2 ln(den),   den = cos(kt/2) - i (omega0/k) sin(kt/2)

    using the principal branch of the logarithm. Raises DenominatorSingular
    when |den| <= 1e-12.
    """
    k = drive.k
    half = k * t / 2
    s = np.sin(half)
    den = np.cos(half) - 1j * (drive.omega0 / k) * s
    if abs(den) <= _SINGULAR_TOL:
        raise DenominatorSingular(f"|den| = {abs(den):.3g} at t = {t!r}")
    common = 1j * drive.gamma / k * s / den
    return DisentanglingFunctions(
        f_plus=complex(cmath.exp(-1j * drive.omega * t) * common),
        f_minus=complex(cmath.exp(1j * drive.omega * t) * common),
        f_z=complex(-2 * cmath.log(complex(den))),
    )


def branch_wrap_flags(drive: DriveParams, t_grid) -> np.ndarray:
    """Flag grid intervals where the f_z log argument crosses the branch cut.

    f_z uses the principal branch; a phase jump of the denominator across
    +-pi between adjacent samples means exp(f_z/2)-style combinations are
    not continuous there. Returns a boolean array of length len(t_grid)-1.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    half = drive.k * t_grid / 2
    den = np.cos(half) - 1j * (drive.omega0 / drive.k) * np.sin(half)
    phase = np.angle(den)
    return np.abs(np.diff(phase)) > np.pi


def a_coeffs_exact(drive: DriveParams, t) -> ACoefficients:
    """Closed-form coefficients (a1, a2, a3, a4), vectorized over t.

    The 0*inf product in the raw a1/a4 expressions (X * (k/gamma)^2/sin^2)
    is pre-simplified to its removable value 1/D, which keeps t = 0 and
    kt = 2 pi n regular; everything else is evaluated as written.
    Raises DenominatorSingular when D <= 1e-12.
    """
    k = drive.k
    w0k = drive.omega0 / k
    gk = drive.gamma / k
    t = np.asarray(t, dtype=float)
    s = np.sin(k * t / 2)
    c = np.cos(k * t / 2)
    s2 = s * s
    c2 = c * c
    D = c2 + w0k * w0k * s2
    if np.any(D <= _SINGULAR_TOL):
        raise DenominatorSingular("a-coefficient denominator D <= 1e-12")
    X = gk * gk * s2 / D
    W = c2 + s2 * (w0k * w0k - gk * gk)
    a1 = 0.5 * (X * (W - 2) + 1 / D - W)
    a4 = 0.5 * (X * (W - 2) + 1 / D + W)
    wt = drive.omega * t
    num2 = np.sin(wt) * c - w0k * np.cos(wt) * s
    num3 = np.cos(wt) * c + w0k * np.sin(wt) * s
    a2 = gk * s * (num2 / D) * (W - 1)
    a3 = gk * s * (num3 / D) * (W + 1)
    if t.ndim == 0:
        return ACoefficients(float(a1), float(a2), float(a3), float(a4))
    return ACoefficients(a1, a2, a3, a4)


def a1_series(drive: DriveParams, t, order: int = 1):
    """Weak-drive expansion of a1 in powers of u = (gamma/omega0)^2.

    Order 1 is u sin^2(kt/2); higher orders extend both geometric sums,
    with the second sum's resummed denominator dropped (its standing
    approximation), so the residual against the closed form is O(u^3)
    for every order >= 2.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if not drive.gamma < drive.omega0:
        raise SeriesInvalid("series requires gamma < omega0")
    u = (drive.gamma / drive.omega0) ** 2
    t = np.asarray(t, dtype=float)
    s2 = np.sin(drive.k * t / 2) ** 2
    s_one = 0.0  # u - u^2 + u^3 - ...
    s_two = 0.0  # u^2 - u^3 + ...
    for n in range(1, order + 1):
        term = (-1.0) ** (n - 1) * u ** n
        s_one += term
        if n >= 2:
            s_two -= term
    out = s_one * s2 - s_two * s2 * s2
    return float(out) if t.ndim == 0 else out


def propagator_matrix(drive: DriveParams, t: float) -> np.ndarray:
    """U(t) = exp(-i [ (omega0 t/2) sz + (gamma t/2)(cos(wt) sx + sin(wt) sy) ]).

    This is the literal exponent of the factorized propagator (the
    oscillatory factors evaluated at time t, no time ordering).
    """
    _, sx, sy, sz = pauli_basis()
    wt = drive.omega * t
    h = (drive.omega0 * t / 2) * sz + (drive.gamma * t / 2) * (
        np.cos(wt) * sx + np.sin(wt) * sy)
    return expm_su2(h)


def heisenberg_sz_oracle(drive: DriveParams, t: float) -> ACoefficients:
    """(a1, a2, a3, a4) from the unitary conjugation U^dag sigma_z U.

    Unitarity forces a4 = 0 and a1^2 + a2^2 + a3^2 = 1; a4 is reported as
    the raw identity coefficient of the conjugated operator.
    """
    u = propagator_matrix(drive, t)
    _, _, _, sz = pauli_basis()
    m = u.conj().T @ sz @ u
    d = decompose_pauli(m)
    return ACoefficients(float(d.c_z.real), float(d.c_x.real),
                         float(d.c_y.real), float(d.c_identity.real))


_REPORT_HEADER = ("t",
                  "a1_printed", "a2_printed", "a3_printed", "a4_printed",
                  "a1_oracle", "a2_oracle", "a3_oracle", "a4_oracle",
                  "d1", "d2", "d3", "d4")


@dataclass(frozen=True)
class ConsistencyReport:
    times: np.ndarray
    printed: np.ndarray  # (n, 4)
    oracle: np.ndarray   # (n, 4)

    @property
    def diffs(self) -> np.ndarray:
        return self.printed - self.oracle

    @property
    def max_abs_diff(self) -> np.ndarray:
        """Per-coefficient maxima of |printed - oracle| over the grid."""
        return np.max(np.abs(self.diffs), axis=0)

    def rows(self):
        for i, t in enumerate(self.times):
            yield (t, *self.printed[i], *self.oracle[i], *self.diffs[i])

    def to_csv_text(self, precision: int = 17) -> str:
        return render_csv(_REPORT_HEADER, self.rows(), precision)

    def to_csv(self, path, precision: int = 17) -> None:
        write_csv(path, _REPORT_HEADER, self.rows(), precision)


def consistency_report(drive: DriveParams, t_grid) -> ConsistencyReport:
    """Tabulate printed closed-form coefficients against the unitary oracle."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    a1, a2, a3, a4 = a_coeffs_exact(drive, t_grid)
    printed = np.column_stack([a1, a2, a3, a4])
    oracle = np.array([heisenberg_sz_oracle(drive, float(t)) for t in t_grid])
    return ConsistencyReport(times=t_grid, printed=printed, oracle=oracle)

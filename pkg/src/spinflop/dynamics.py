"""Reduced dynamics: fixed-step propagation of the 2x2 density matrix.

The generator is assembled from independently toggleable pieces: coherent
drive, pure dephasing (double commutator in sigma_z, off-diagonal rate
4*d_factor), the two sandwich terms weighted by kappa_y and kappa_x, and
the Hamiltonian shifts. Any combination is allowed. The sandwich terms with
complex kappa are not trace-preserving as constructed, and the shifted
Hamiltonian is not guaranteed integrable at the default step, so runs that
enable them tend to trip the trace guard; that is reported, not hidden.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, BathParams, DriveParams, PhysicalConstants
from .decoherence import (A1Mode, SuperopCoefficients, dfactor_quadrature,
                          superop_coefficients)
from .errors import InsufficientDecay, InvariantBreach, NonHermitianInput, StepTooLarge
from .kernels import DEFAULT_QUADRATURE, QuadratureSettings
from ._integrators import master_rk4
from ._tables import render_csv, write_csv

_HERMITICITY_TOL = 1e-12

_ZERO_COEFFS = None  # initialized lazily to avoid import-order clutter


@dataclass(frozen=True)
class TermToggles:
    """Which generator terms participate in a run.

    d1 is the kappa_y sandwich (sigma_y . sigma_z + h.c.), d2 the kappa_x
    one. Defaults keep the trace-conserving subset on; the sandwich and
    shift terms are opt-in.
    """

    unitary: bool = True
    dephasing: bool = True
    d1: bool = False
    d2: bool = False
    lamb_shifts: bool = False


_CSV_HEADER = ("t", "re00", "im00", "re01", "im01", "re10", "im10",
               "re11", "im11", "trace", "purity", "abs_rho01")


@dataclass
class Trajectory:
    times: np.ndarray
    rhos: np.ndarray            # (n, 2, 2) complex
    dt: float
    toggles: TermToggles
    d_factor: float | None = None
    trace_drift: float = 0.0
    herm_residue: float = 0.0
    min_eigenvalue: float = 0.0

    def coherence(self) -> np.ndarray:
        return self.rhos[:, 0, 1]

    def populations(self) -> np.ndarray:
        return np.real(self.rhos[:, [0, 1], [0, 1]])

    def trace(self) -> np.ndarray:
        return np.real(self.rhos[:, 0, 0] + self.rhos[:, 1, 1])

    def purity(self) -> np.ndarray:
        r = self.rhos
        return np.real(r[:, 0, 0] ** 2 + r[:, 1, 1] ** 2
                       + 2 * r[:, 0, 1] * r[:, 1, 0])

    def rows(self):
        tr = self.trace()
        pur = self.purity()
        mag = np.abs(self.coherence())
        r = self.rhos
        for i, t in enumerate(self.times):
            yield (float(t),
                   float(r[i, 0, 0].real), float(r[i, 0, 0].imag),
                   float(r[i, 0, 1].real), float(r[i, 0, 1].imag),
                   float(r[i, 1, 0].real), float(r[i, 1, 0].imag),
                   float(r[i, 1, 1].real), float(r[i, 1, 1].imag),
                   float(tr[i]), float(pur[i]), float(mag[i]))

    def to_csv_text(self, precision: int = 17) -> str:
        return render_csv(_CSV_HEADER, self.rows(), precision)

    def to_csv(self, path, precision: int = 17) -> None:
        write_csv(path, _CSV_HEADER, self.rows(), precision)


def _validate_rho0(rho0: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"initial state must be 2x2, got shape {rho.shape}")
    scale = max(1.0, float(np.max(np.abs(rho))))
    residue = float(np.max(np.abs(rho - rho.conj().T)))
    if residue > _HERMITICITY_TOL * scale:
        raise NonHermitianInput(
            f"initial state deviates from Hermitian by {residue:.3e}")
    tr = complex(rho[0, 0] + rho[1, 1])
    if abs(tr - 1.0) > 1e-12:
        raise ValueError(f"initial state trace is {tr}, expected 1")
    return rho


def _zero_coeffs() -> SuperopCoefficients:
    global _ZERO_COEFFS
    if _ZERO_COEFFS is None:
        _ZERO_COEFFS = SuperopCoefficients(0.0, 0.0, 0.0, 0j, 0j)
    return _ZERO_COEFFS


def evolve_master(drive: DriveParams, bath: BathParams,
                  coeffs: SuperopCoefficients | None = None,
                  d_factor: float | None = None,
                  rho0: np.ndarray | None = None,
                  t_final: float | None = None,
                  dt: float | None = None,
                  toggles: TermToggles | None = None,
                  *,
                  sample_stride: int = 1,
                  breach_tol: float = 1e-6,
                  settings: QuadratureSettings = DEFAULT_QUADRATURE,
                  constants: PhysicalConstants = CONSTANTS) -> Trajectory:
    """Propagate rho0 with fixed-step RK4 under the selected terms.

    coeffs and d_factor may be left None; they are then computed here
    (quadrature with the exact a1 for d_factor, the shift/kappa integrals
    for coeffs) for exactly the terms the toggles enable. The run aborts
    with InvariantBreach the moment |tr rho - tr rho0| exceeds breach_tol.
    """
    toggles = toggles if toggles is not None else TermToggles()
    if rho0 is None or t_final is None or dt is None:
        raise TypeError("rho0, t_final and dt are required")
    rho = _validate_rho0(rho0)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError(f"t_final = {t_final} shorter than one step dt = {dt}")
    if sample_stride < 1:
        raise ValueError(f"sample_stride must be >= 1, got {sample_stride}")

    needs_coeffs = toggles.d1 or toggles.d2 or toggles.lamb_shifts
    if coeffs is None:
        # the shift/kappa integrals cost seconds; only pay when needed
        coeffs = (superop_coefficients(drive, bath, settings, constants)
                  if needs_coeffs else _zero_coeffs())
    if d_factor is None:
        d_factor = (dfactor_quadrature(drive, bath, A1Mode.exact(),
                                       settings, constants=constants).d_factor
                    if toggles.dephasing else 0.0)

    d_eff = d_factor if toggles.dephasing else 0.0
    kx_eff = coeffs.kappa_x if toggles.d2 else 0j
    ky_eff = coeffs.kappa_y if toggles.d1 else 0j
    scale = max(drive.k if toggles.unitary else 0.0,
                abs(d_eff), abs(kx_eff), abs(ky_eff))
    if scale > 0 and dt * scale >= 0.05:
        raise StepTooLarge(
            f"dt*rate = {dt * scale:.3g} >= 0.05; reduce dt below "
            f"{0.05 / scale:.3e} s for this generator")

    n_samples = n_steps // sample_stride + 1
    out = np.empty((n_samples, 2, 2), dtype=complex)
    drift, herm, mineig, breach = master_rk4(
        rho, drive.omega0, drive.gamma, drive.omega,
        float(d_eff), complex(kx_eff), complex(ky_eff),
        float(coeffs.shift_x), float(coeffs.shift_y), float(coeffs.shift_z),
        toggles.unitary, toggles.dephasing, toggles.d1, toggles.d2,
        toggles.lamb_shifts, dt, n_steps, sample_stride, breach_tol, out)
    if breach >= 0:
        raise InvariantBreach(
            f"trace moved by more than {breach_tol:.1e} at step {breach} "
            f"(t = {breach * dt:.3e} s)")
    times = np.arange(n_samples) * (dt * sample_stride)
    return Trajectory(times=times, rhos=out, dt=dt, toggles=toggles,
                      d_factor=float(d_eff) if toggles.dephasing else None,
                      trace_drift=float(drift), herm_residue=float(herm),
                      min_eigenvalue=float(mineig))


def evolve_dephasing_closed(d_factor: float, rho0: np.ndarray, t):
    """Pure-dephasing map in closed form.

    Populations are frozen; off-diagonals are multiplied by e^{-4 d_factor t}
    (so the coherence half-life is ln2/(4 d_factor); conventions that quote
    the bare d_factor as the rate differ by that factor of 4). Scalar t
    returns a 2x2 matrix, an array of times the stacked (n, 2, 2) result.
    """
    rho = _validate_rho0(rho0)
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0):
        raise ValueError("t must be nonnegative")
    decay = np.exp(-4.0 * d_factor * ts)
    if ts.ndim == 0:
        out = rho.copy()
        out[0, 1] *= decay
        out[1, 0] *= decay
        return out
    rhos = np.empty((len(ts), 2, 2), dtype=complex)
    rhos[:, 0, 0] = rho[0, 0]
    rhos[:, 1, 1] = rho[1, 1]
    rhos[:, 0, 1] = rho[0, 1] * decay
    rhos[:, 1, 0] = rho[1, 0] * decay
    return rhos


def dephasing_closed_trajectory(d_factor: float, rho0: np.ndarray,
                                times: np.ndarray) -> Trajectory:
    """evolve_dephasing_closed sampled on a grid, packaged as a Trajectory."""
    ts = np.asarray(times, dtype=float)
    rhos = evolve_dephasing_closed(d_factor, rho0, ts)
    rho = rhos[0]
    m = 0.5 * (rho[0, 0].real - rho[1, 1].real)
    off = np.abs(rhos[:, 0, 1])
    mineig = float(np.min(0.5 - np.sqrt(m * m + off * off)))
    dt = float(ts[1] - ts[0]) if len(ts) > 1 else 0.0
    tog = TermToggles(unitary=False, dephasing=True, d1=False, d2=False,
                      lamb_shifts=False)
    return Trajectory(times=ts, rhos=rhos, dt=dt, toggles=tog,
                      d_factor=float(d_factor), min_eigenvalue=mineig)


def extract_decay_rate(traj: Trajectory) -> float:
    """Least-squares decay rate r from |rho01(t)| ~ |rho01(0)| e^{-r t}.

    Fits ln|rho01| over [0, min(t_final, 3/(4 d_factor))] (falling back to
    the observed e^{-3} crossing when the trajectory carries no d_factor).
    When the unitary term was active the fit uses the envelope, i.e. local
    maxima of |rho01|, since the drive superposes oscillation on the decay.
    """
    ts = np.asarray(traj.times, dtype=float)
    mags = np.abs(traj.coherence())
    if len(mags) == 0 or mags[0] <= 1e-12:
        raise InsufficientDecay("initial coherence magnitude is below 1e-12")

    if traj.d_factor is not None and traj.d_factor > 0:
        t_window = 3.0 / (4.0 * traj.d_factor)
        stop = int(np.searchsorted(ts, t_window, side="right"))
    else:
        below = np.nonzero(mags < mags[0] * np.exp(-3.0))[0]
        stop = int(below[0]) if len(below) else len(mags)
    stop = max(stop, 1)
    ts = ts[:stop]
    mags = mags[:stop]

    if traj.toggles.unitary and len(mags) > 2:
        interior = (mags[1:-1] >= mags[:-2]) & (mags[1:-1] >= mags[2:])
        idx = np.nonzero(interior)[0] + 1
        idx = np.concatenate(([0], idx))
        # monotone decay has no interior maxima; raw samples are their
        # own envelope
        if len(idx) >= 10:
            ts = ts[idx]
            mags = mags[idx]

    usable = mags > 1e-12
    ts = ts[usable]
    mags = mags[usable]
    if len(mags) < 10:
        raise InsufficientDecay(
            f"only {len(mags)} usable samples; need at least 10")
    if mags[-1] > 0.9 * mags[0]:
        raise InsufficientDecay(
            f"coherence decayed only {(1 - mags[-1] / mags[0]) * 100:.2f}%; "
            "need at least 10%")
    logs = np.log(mags)
    design = np.column_stack([np.ones_like(ts), ts])
    sol, *_ = np.linalg.lstsq(design, logs, rcond=None)
    return float(-sol[1])

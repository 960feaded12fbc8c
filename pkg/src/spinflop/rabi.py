"""Rotating-drive two-level dynamics: flip probability, retrieval period, TDSE."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DriveParams
from .errors import StepTooLarge, ZeroDrive
from ._integrators import tdse_rk4


@dataclass(frozen=True)
class SpinState:
    c_plus: complex
    c_minus: complex

    def norm(self) -> float:
        return abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2

    def population_minus(self) -> float:
        return abs(self.c_minus) ** 2


def transition_probability(drive: DriveParams, t) -> np.ndarray | float:
    """Flip probability [gamma^2/(gamma^2+delta^2)] sin^2(sqrt(gamma^2+delta^2) t/2).

    Exact for the circularly rotating transverse drive. delta = omega - omega0.
    Accepts scalar or array t.
    """
    g = drive.gamma
    delta = drive.detuning
    rabi = np.hypot(g, delta)
    t = np.asarray(t, dtype=float)
    if rabi == 0.0:
        out = np.zeros_like(t)
        return out if out.ndim else float(out)
    p = (g * g) / (rabi * rabi) * np.sin(rabi * t / 2) ** 2
    return p if p.ndim else float(p)


@dataclass(frozen=True)
class RetrievalPeriod:
    tau: float  # s, always > 0


def retrieval_period(drive: DriveParams) -> RetrievalPeriod:
    """Time 2*pi/gamma after which the resonant drive returns the spin."""
    if drive.gamma == 0.0:
        raise ZeroDrive("retrieval period is undefined for gamma = 0")
    return RetrievalPeriod(tau=2 * np.pi / drive.gamma)


@dataclass(frozen=True)
class TdseResult:
    times: np.ndarray          # (n_samples,) s
    amplitudes: np.ndarray     # (n_samples, 2) complex, columns (c_plus, c_minus)
    dt: float
    peak_norm_drift: float

    def states(self):
        for t, (cp, cm) in zip(self.times, self.amplitudes):
            yield float(t), SpinState(complex(cp), complex(cm))

    def __iter__(self):
        # the result doubles as a sequence of (t, SpinState) samples
        return self.states()

    def __len__(self) -> int:
        return len(self.times)

    def populations_minus(self) -> np.ndarray:
        return np.abs(self.amplitudes[:, 1]) ** 2


def evolve_tdse(drive: DriveParams, psi0: SpinState, t_final: float, dt: float,
                sample_stride: int = 1) -> TdseResult:
    """Fixed-step RK4 integration of the amplitudes under the rotating drive.

    No adaptivity and no mid-run renormalization; peak norm drift is recorded
    in the result. Raises StepTooLarge when dt*k >= 0.1 (k the generalized
    precession rate).
    """
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    if dt * drive.k >= 0.1:
        raise StepTooLarge(f"dt*k = {dt * drive.k:.3g} >= 0.1")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError(f"t_final = {t_final} shorter than one step dt = {dt}")
    n_samples = n_steps // sample_stride + 1
    out = np.zeros((n_samples, 2), dtype=np.complex128)
    out[0, 0] = psi0.c_plus
    out[0, 1] = psi0.c_minus
    drift = tdse_rk4(drive.omega0, drive.gamma, drive.omega,
                     float(dt), n_steps, int(sample_stride), out)
    times = np.arange(n_samples) * (sample_stride * dt)
    return TdseResult(times=times, amplitudes=out, dt=float(dt),
                      peak_norm_drift=float(drift))

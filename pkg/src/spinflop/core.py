"""Shared parameter types, physical constants, and 2x2 operator helpers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonHermitianInput

Mat2 = np.ndarray  # 2x2 complex matrix


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34        # J s
    k_boltzmann: float = 1.380649e-23    # J/K
    gyro_factor: float = 1.75882001076e7  # rad s^-1 G^-1, e/(m_e c) in Gaussian units


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DriveParams:
    """Static level splitting plus a circularly rotating transverse drive.

    omega0 : level splitting, rad/s (> 0)
    gamma  : drive (flip) amplitude, rad/s (>= 0)
    omega  : drive rotation frequency, rad/s (>= 0)
    """

    omega0: float
    gamma: float
    omega: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if self.omega < 0:
            raise ValueError(f"omega must be non-negative, got {self.omega}")

    @property
    def k(self) -> float:
        # generalized precession rate sqrt(gamma^2 + omega0^2)
        return float(np.hypot(self.gamma, self.omega0))

    @property
    def detuning(self) -> float:
        return self.omega - self.omega0


@dataclass(frozen=True)
class CothMode:
    """How the thermal coth factor of the noise kernel is treated.

    kind is one of "high_t" (classical 2kT/hbar-omega limit), "series"
    (truncated Taylor expansion of coth, `order` terms beyond the leading
    one), or "exact".
    """

    kind: str
    order: int = 0

    _KINDS = ("high_t", "series", "exact")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown coth mode {self.kind!r}")
        if self.kind == "series" and not (1 <= self.order <= 20):
            raise ValueError(f"series order must be in 1..20, got {self.order}")
        if self.kind != "series" and self.order != 0:
            raise ValueError("order is only meaningful for series mode")

    @classmethod
    def high_t(cls) -> "CothMode":
        return cls("high_t")

    @classmethod
    def series(cls, order: int) -> "CothMode":
        return cls("series", order)

    @classmethod
    def exact(cls) -> "CothMode":
        return cls("exact")


@dataclass(frozen=True)
class BathParams:
    """Ohmic bath with exponential cutoff at `cutoff` (rad/s), at `temperature` (K)."""

    temperature: float
    cutoff: float
    coth_mode: CothMode = field(default_factory=CothMode.high_t)

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def thermal_energy(self, constants: PhysicalConstants = CONSTANTS) -> float:
        return constants.k_boltzmann * self.temperature  # J


@dataclass(frozen=True)
class PauliDecomposition:
    """Coefficients of m = c_identity*I + c_x*sx + c_y*sy + c_z*sz."""

    c_identity: complex
    c_x: complex
    c_y: complex
    c_z: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c_identity, self.c_x, self.c_y, self.c_z])


_IDENT = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def pauli_basis() -> tuple[Mat2, Mat2, Mat2, Mat2]:
    """Return (I, sigma_x, sigma_y, sigma_z) as fresh 2x2 complex arrays."""
    return _IDENT.copy(), _SX.copy(), _SY.copy(), _SZ.copy()


def decompose_pauli(m: Mat2) -> PauliDecomposition:
    """Expand a 2x2 matrix in the Pauli basis; c_alpha = Tr(sigma_alpha m)/2."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return PauliDecomposition(
        c_identity=(m[0, 0] + m[1, 1]) / 2,
        c_x=(m[0, 1] + m[1, 0]) / 2,
        c_y=(1j * (m[0, 1] - m[1, 0])) / 2,
        c_z=(m[0, 0] - m[1, 1]) / 2,
    )


def compose_pauli(d: PauliDecomposition) -> Mat2:
    """Inverse of decompose_pauli."""
    return d.c_identity * _IDENT + d.c_x * _SX + d.c_y * _SY + d.c_z * _SZ


def expm_su2(h: Mat2, tol: float = 1e-12) -> Mat2:
    """exp(-i h) for Hermitian 2x2 h, via the closed SU(2) form.

    With h = c0*I + v.sigma the result is
    exp(-i c0) * (cos|v| I - i sin|v| (v.sigma)/|v|), exact up to rounding.
    Raises NonHermitianInput if h deviates from Hermiticity beyond tol
    (relative to its largest entry).
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))))
    if float(np.max(np.abs(h - h.conj().T))) > tol * scale:
        raise NonHermitianInput("expm_su2 requires a Hermitian matrix")
    c0 = (h[0, 0] + h[1, 1]).real / 2
    vz = (h[0, 0] - h[1, 1]).real / 2
    vx = h[0, 1].real
    vy = -h[0, 1].imag
    r = np.sqrt(vx * vx + vy * vy + vz * vz)
    # sin(r)/r via sinc keeps the r -> 0 limit exact
    sinc = np.sinc(r / np.pi)
    u = np.cos(r) * _IDENT - 1j * sinc * (vx * _SX + vy * _SY + vz * _SZ)
    return np.exp(-1j * c0) * u


def gamma_from_field(b_gauss: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Flip amplitude gamma (rad/s) for a transverse field of b_gauss gauss."""
    if b_gauss < 0:
        raise ValueError(f"field must be non-negative, got {b_gauss}")
    return constants.gyro_factor * b_gauss

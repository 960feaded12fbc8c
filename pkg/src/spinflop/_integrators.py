"""Fixed-step RK4 inner loops, compiled with numba.

Both integrators deliberately use a fixed step and never renormalize
mid-run; norm/trace drift is recorded as a diagnostic instead.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def tdse_rk4(omega0, gamma, omega, dt, n_steps, stride, out):
    """Integrate the two-level amplitudes under the rotating drive.

    i d/dt (c+, c-) = H(t)/hbar (c+, c-),
    H/hbar = 0.5*[[omega0, gamma e^{-i omega t}], [gamma e^{+i omega t}, -omega0]].

    out : preallocated complex array (n_samples, 2); row j holds the state
          after j*stride steps. Returns peak |norm - 1| over all steps.
    """
    cp = out[0, 0]
    cm = out[0, 1]
    drift = 0.0
    j = 0
    for i in range(n_steps):
        t = i * dt
        ph0 = np.exp(-1j * omega * t)
        ph1 = np.exp(-1j * omega * (t + 0.5 * dt))
        ph2 = np.exp(-1j * omega * (t + dt))

        k1p = -0.5j * (omega0 * cp + gamma * ph0 * cm)
        k1m = -0.5j * (gamma * np.conj(ph0) * cp - omega0 * cm)
        ap = cp + 0.5 * dt * k1p
        am = cm + 0.5 * dt * k1m
        k2p = -0.5j * (omega0 * ap + gamma * ph1 * am)
        k2m = -0.5j * (gamma * np.conj(ph1) * ap - omega0 * am)
        ap = cp + 0.5 * dt * k2p
        am = cm + 0.5 * dt * k2m
        k3p = -0.5j * (omega0 * ap + gamma * ph1 * am)
        k3m = -0.5j * (gamma * np.conj(ph1) * ap - omega0 * am)
        ap = cp + dt * k3p
        am = cm + dt * k3m
        k4p = -0.5j * (omega0 * ap + gamma * ph2 * am)
        k4m = -0.5j * (gamma * np.conj(ph2) * ap - omega0 * am)

        cp = cp + dt * (k1p + 2 * k2p + 2 * k3p + k4p) / 6
        cm = cm + dt * (k1m + 2 * k2m + 2 * k3m + k4m) / 6

        d = abs(abs(cp) ** 2 + abs(cm) ** 2 - 1.0)
        if d > drift:
            drift = d
        if (i + 1) % stride == 0:
            j += 1
            if j < out.shape[0]:
                out[j, 0] = cp
                out[j, 1] = cm
    return drift


@njit(cache=True, inline="always")
def _master_rhs(t, r00, r01, r10, r11,
                omega0, gamma, omega, d_factor, kx, ky,
                shift_x, shift_y, shift_z,
                tog_u, tog_deph, tog_d1, tog_d2, tog_ls):
    d00 = 0j
    d01 = 0j
    d10 = 0j
    d11 = 0j
    if tog_u:
        if tog_ls:
            az = omega0 - shift_z
            ax = gamma * np.cos(omega * t) - shift_x
            ay = gamma * np.sin(omega * t) + shift_y
        else:
            az = omega0
            ax = gamma * np.cos(omega * t)
            ay = gamma * np.sin(omega * t)
        h00 = 0.5 * az
        h01 = 0.5 * (ax - 1j * ay)
        h10 = np.conj(h01)
        h11 = -0.5 * az
        d00 += -1j * (h00 * r00 + h01 * r10 - r00 * h00 - r01 * h10)
        d01 += -1j * (h00 * r01 + h01 * r11 - r00 * h01 - r01 * h11)
        d10 += -1j * (h10 * r00 + h11 * r10 - r10 * h00 - r11 * h10)
        d11 += -1j * (h10 * r01 + h11 * r11 - r10 * h01 - r11 * h11)
    if tog_deph:
        # [sz,[sz,rho]] kills only the coherences, at 4*d_factor
        d01 += -4.0 * d_factor * r01
        d10 += -4.0 * d_factor * r10
    if tog_d1:
        # ky sy rho sz + ky* sz rho sy
        kyc = np.conj(ky)
        d00 += ky * (-1j * r10) + kyc * (1j * r01)
        d01 += ky * (1j * r11) + kyc * (-1j * r00)
        d10 += ky * (1j * r00) + kyc * (-1j * r11)
        d11 += ky * (-1j * r01) + kyc * (1j * r10)
    if tog_d2:
        # kx sx rho sz + kx* sz rho sx
        kxc = np.conj(kx)
        d00 += kx * r10 + kxc * r01
        d01 += kx * (-r11) + kxc * r00
        d10 += kx * r00 + kxc * (-r11)
        d11 += kx * (-r01) + kxc * (-r10)
    return d00, d01, d10, d11


@njit(cache=True)
def master_rk4(rho0, omega0, gamma, omega, d_factor, kx, ky,
               shift_x, shift_y, shift_z,
               tog_u, tog_deph, tog_d1, tog_d2, tog_ls,
               dt, n_steps, stride, breach_tol, out):
    """RK4 on the 2x2 density matrix; returns diagnostics.

    out : preallocated (n_samples, 2, 2) complex array, row j = state after
          j*stride steps.
    Returns (trace_drift_max, herm_residue_max, min_eigenvalue, breach_step);
    breach_step >= 0 flags |tr rho - tr rho0| > breach_tol at that step.
    """
    r00 = rho0[0, 0]
    r01 = rho0[0, 1]
    r10 = rho0[1, 0]
    r11 = rho0[1, 1]
    tr0 = (r00 + r11).real
    drift = 0.0
    herm = 0.0
    mineig = 1e300
    breach = -1
    j = 0
    out[0, 0, 0] = r00
    out[0, 0, 1] = r01
    out[0, 1, 0] = r10
    out[0, 1, 1] = r11
    for i in range(n_steps):
        t = i * dt
        a00, a01, a10, a11 = _master_rhs(t, r00, r01, r10, r11,
                                         omega0, gamma, omega, d_factor, kx, ky,
                                         shift_x, shift_y, shift_z,
                                         tog_u, tog_deph, tog_d1, tog_d2, tog_ls)
        th = t + 0.5 * dt
        b00, b01, b10, b11 = _master_rhs(th,
                                         r00 + 0.5 * dt * a00, r01 + 0.5 * dt * a01,
                                         r10 + 0.5 * dt * a10, r11 + 0.5 * dt * a11,
                                         omega0, gamma, omega, d_factor, kx, ky,
                                         shift_x, shift_y, shift_z,
                                         tog_u, tog_deph, tog_d1, tog_d2, tog_ls)
        c00, c01, c10, c11 = _master_rhs(th,
                                         r00 + 0.5 * dt * b00, r01 + 0.5 * dt * b01,
                                         r10 + 0.5 * dt * b10, r11 + 0.5 * dt * b11,
                                         omega0, gamma, omega, d_factor, kx, ky,
                                         shift_x, shift_y, shift_z,
                                         tog_u, tog_deph, tog_d1, tog_d2, tog_ls)
        te = t + dt
        e00, e01, e10, e11 = _master_rhs(te,
                                         r00 + dt * c00, r01 + dt * c01,
                                         r10 + dt * c10, r11 + dt * c11,
                                         omega0, gamma, omega, d_factor, kx, ky,
                                         shift_x, shift_y, shift_z,
                                         tog_u, tog_deph, tog_d1, tog_d2, tog_ls)
        r00 = r00 + dt * (a00 + 2 * b00 + 2 * c00 + e00) / 6
        r01 = r01 + dt * (a01 + 2 * b01 + 2 * c01 + e01) / 6
        r10 = r10 + dt * (a10 + 2 * b10 + 2 * c10 + e10) / 6
        r11 = r11 + dt * (a11 + 2 * b11 + 2 * c11 + e11) / 6

        tr = (r00 + r11).real
        d = abs(tr - tr0)
        if d > drift:
            drift = d
        h = abs(r01 - np.conj(r10))
        hi = abs((r00 + r11).imag)
        if hi > h:
            h = hi
        if h > herm:
            herm = h
        m = 0.5 * (r00.real - r11.real)
        disc = np.sqrt(m * m + abs(r01) * abs(r10))
        lo = 0.5 * tr - disc
        if lo < mineig:
            mineig = lo
        if d > breach_tol and breach < 0:
            breach = i
            # record and stop: state past this point is not meaningful
            if j + 1 < out.shape[0]:
                out[j + 1, 0, 0] = r00
                out[j + 1, 0, 1] = r01
                out[j + 1, 1, 0] = r10
                out[j + 1, 1, 1] = r11
            break
        if (i + 1) % stride == 0:
            j += 1
            if j < out.shape[0]:
                out[j, 0, 0] = r00
                out[j, 0, 1] = r01
                out[j, 1, 0] = r10
                out[j, 1, 1] = r11
    return drift, herm, mineig, breach

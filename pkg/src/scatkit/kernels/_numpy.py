"""Pure-numpy implementations of the hot summation kernels.

Semantics match scatkit.kernels._fast exactly; this module is the fallback
selected when the compiled extension is unavailable.
"""

from __future__ import annotations

import numpy as np


def _bump(dist, r1, r2):
    dist = np.asarray(dist, dtype=float)
    out = np.zeros_like(dist)
    out[dist <= r1] = 1.0
    mask = (dist > r1) & (dist < r2)
    if np.any(mask):
        s = (dist[mask] - r1) / (r2 - r1)
        out[mask] = np.exp(1.0 - 1.0 / (1.0 - s * s))
    return out


def packet_phase_sum_1d(nodes, weights, pbar, mass, gamma_tau, r1, r2, x0, x1):
    """Weighted sum over 1-d momentum nodes of
    chi * exp(-gamma_tau (p - pbar)^2) / (2 omega) * exp(-i (omega x0 - p x1))."""
    p = np.asarray(nodes, dtype=float)
    w = np.asarray(weights, dtype=float)
    d = p - pbar
    omega = np.sqrt(mass * mass + p * p)
    amp = w * _bump(np.abs(d), r1, r2) * np.exp(-gamma_tau * d * d) / (2.0 * omega)
    phase = -(omega * x0 - p * x1)
    return complex(np.sum(amp * np.exp(1j * phase)))


def packet_phase_sum_3d(nx, wx, ny, wy, nz, wz, pbar, mass, gamma_tau, r1, r2, x0, xs):
    """Tensor-product weighted sum over a 3-d momentum grid; slabs over the
    first axis keep memory flat."""
    pbar = np.asarray(pbar, dtype=float)
    xs = np.asarray(xs, dtype=float)
    py = np.asarray(ny, dtype=float)[:, None]
    pz = np.asarray(nz, dtype=float)[None, :]
    wyz = np.outer(wy, wz)
    dy = py - pbar[1]
    dz = pz - pbar[2]
    dyz2 = dy * dy + dz * dz
    pyz2 = py * py + pz * pz
    phase_yz = py * xs[1] + pz * xs[2]
    total = 0.0 + 0.0j
    for i in range(len(nx)):
        px = float(nx[i])
        dx = px - pbar[0]
        d2 = dx * dx + dyz2
        omega = np.sqrt(mass * mass + px * px + pyz2)
        chi = _bump(np.sqrt(d2), r1, r2)
        amp = wx[i] * wyz * chi * np.exp(-gamma_tau * d2) / (2.0 * omega)
        phase = -(omega * x0 - (px * xs[0] + phase_yz))
        total += np.sum(amp * np.exp(1j * phase))
    return complex(total)


def plane_wave_sum(nodes, coeffs, q_re, q_im):
    """Sum of coeffs[j] * exp(i q . v_j) for complex frequency q = q_re + i q_im
    and node rows v_j."""
    v = np.atleast_2d(np.asarray(nodes, dtype=float))
    if v.shape[0] == 1 and v.shape[1] != len(coeffs):
        v = v.T
    c = np.asarray(coeffs, dtype=complex)
    qr = np.asarray(q_re, dtype=float)
    qi = np.asarray(q_im, dtype=float)
    phase = v @ qr
    damp = v @ qi
    return complex(np.sum(c * np.exp(1j * phase - damp)))

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled summation kernels; numpy fallback twin lives in _numpy.py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin, sqrt

cnp.import_array()


cdef inline double _bump(double dist, double r1, double r2) nogil:
    cdef double s
    if dist <= r1:
        return 1.0
    if dist >= r2:
        return 0.0
    s = (dist - r1) / (r2 - r1)
    return exp(1.0 - 1.0 / (1.0 - s * s))


def packet_phase_sum_1d(double[::1] nodes, double[::1] weights, double pbar,
                        double mass, double gamma_tau, double r1, double r2,
                        double x0, double x1):
    cdef Py_ssize_t i, n = nodes.shape[0]
    cdef double p, d, omega, amp, phase
    cdef double acc_re = 0.0, acc_im = 0.0
    with nogil:
        for i in range(n):
            p = nodes[i]
            d = p - pbar
            amp = _bump(d if d >= 0 else -d, r1, r2)
            if amp == 0.0:
                continue
            omega = sqrt(mass * mass + p * p)
            amp *= weights[i] * exp(-gamma_tau * d * d) / (2.0 * omega)
            phase = -(omega * x0 - p * x1)
            acc_re += amp * cos(phase)
            acc_im += amp * sin(phase)
    return complex(acc_re, acc_im)


def packet_phase_sum_3d(double[::1] nx, double[::1] wx,
                        double[::1] ny, double[::1] wy,
                        double[::1] nz, double[::1] wz,
                        double[::1] pbar, double mass, double gamma_tau,
                        double r1, double r2, double x0, double[::1] xs):
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t n1 = nx.shape[0], n2 = ny.shape[0], n3 = nz.shape[0]
    cdef double px, py, pz, dx, dy, dz, d2, omega, chi, amp, phase
    cdef double m2 = mass * mass
    cdef double acc_re = 0.0, acc_im = 0.0
    cdef double wxy
    with nogil:
        for i in range(n1):
            px = nx[i]
            dx = px - pbar[0]
            for j in range(n2):
                py = ny[j]
                dy = py - pbar[1]
                wxy = wx[i] * wy[j]
                for k in range(n3):
                    pz = nz[k]
                    dz = pz - pbar[2]
                    d2 = dx * dx + dy * dy + dz * dz
                    chi = _bump(sqrt(d2), r1, r2)
                    if chi == 0.0:
                        continue
                    omega = sqrt(m2 + px * px + py * py + pz * pz)
                    amp = wxy * wz[k] * chi * exp(-gamma_tau * d2) / (2.0 * omega)
                    phase = -(omega * x0 - (px * xs[0] + py * xs[1] + pz * xs[2]))
                    acc_re += amp * cos(phase)
                    acc_im += amp * sin(phase)
    return complex(acc_re, acc_im)


def plane_wave_sum(double[:, ::1] nodes, double complex[::1] coeffs,
                   double[::1] q_re, double[::1] q_im):
    cdef Py_ssize_t j, a, n = nodes.shape[0], l = nodes.shape[1]
    cdef double phase, damp, w, cr, ci
    cdef double acc_re = 0.0, acc_im = 0.0
    with nogil:
        for j in range(n):
            phase = 0.0
            damp = 0.0
            for a in range(l):
                phase += nodes[j, a] * q_re[a]
                damp += nodes[j, a] * q_im[a]
            w = exp(-damp)
            cr = coeffs[j].real
            ci = coeffs[j].imag
            acc_re += w * (cr * cos(phase) - ci * sin(phase))
            acc_im += w * (cr * sin(phase) + ci * cos(phase))
    return complex(acc_re, acc_im)

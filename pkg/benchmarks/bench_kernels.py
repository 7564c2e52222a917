"""Benchmark of the hot summation kernels: compiled extension vs numpy.

Times the oscillatory packet sums (the dominant cost of the fall-off
experiments) and the plane-wave sum used by the transform machinery, and
checks that the two backends agree to rounding.  Run as

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from scatkit.kernels import BACKEND, numpy_backend
from scatkit.kernels import packet_phase_sum_1d, packet_phase_sum_3d, plane_wave_sum


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_1d(n=200_000):
    nodes = np.linspace(-0.45, 0.45, n)
    wts = np.full(n, 0.9 / n)
    args = (nodes, wts, 0.0, 1.0, 0.5, 0.3, 0.45, 150.0, 60.0)
    fast, t_fast = _time(packet_phase_sum_1d, *args)
    slow, t_slow = _time(numpy_backend.packet_phase_sum_1d, *args)
    return "packet 1d", n, t_fast, t_slow, abs(fast - slow)


def bench_3d(n=288):
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = np.ascontiguousarray(1.4 * x)
    wts = np.ascontiguousarray(1.4 * w)
    args = (
        nodes, wts, nodes, wts, nodes, wts,
        np.zeros(3), 1.0, 0.2, 0.6, 1.4, 120.0, np.array([40.0, 0.0, 0.0]),
    )
    fast, t_fast = _time(packet_phase_sum_3d, *args, repeat=2)
    slow, t_slow = _time(numpy_backend.packet_phase_sum_3d, *args, repeat=2)
    return f"packet 3d ({n}^3)", n**3, t_fast, t_slow, abs(fast - slow)


def bench_plane_wave(n=1_000_000):
    rng = np.random.default_rng(0)
    nodes = np.ascontiguousarray(rng.normal(size=(n, 2)))
    coeffs = np.ascontiguousarray(rng.normal(size=n) + 1j * rng.normal(size=n))
    qr = np.array([0.7, -0.3])
    qi = np.array([0.02, 0.01])
    fast, t_fast = _time(plane_wave_sum, nodes, coeffs, qr, qi)
    slow, t_slow = _time(numpy_backend.plane_wave_sum, nodes, coeffs, qr, qi)
    return "plane wave (l=2)", n, t_fast, t_slow, abs(fast - slow)


def main():
    print(f"selected backend: {BACKEND}")
    if BACKEND == "numpy":
        print("(compiled extension unavailable; timing the fallback against itself)")
    print(f"{'kernel':<20} {'evals':>12} {'selected':>12} {'numpy':>12} {'speedup':>9} {'|diff|':>10}")
    for row in (bench_1d(), bench_3d(), bench_plane_wave()):
        name, n, t_fast, t_slow, diff = row
        print(f"{name:<20} {n:>12,} {t_fast:>11.4f}s {t_slow:>11.4f}s {t_slow / t_fast:>8.1f}x {diff:>10.2e}")


if __name__ == "__main__":
    main()

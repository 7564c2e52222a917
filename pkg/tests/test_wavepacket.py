import math

import numpy as np
import pytest

from scatkit.errors import HoleExcludedError, QuadratureError
from scatkit.fourvector import FourVector, ZERO
from scatkit.kernels import numpy_backend, packet_phase_sum_1d
from scatkit.packets import BumpProfile, MomentumWavePacket, rest_packet
from scatkit.wavepacket import (
    QuadOptions,
    contour_certificate,
    evaluate_position,
    falloff_fit,
    oncone_limit_check,
    oncone_normalizer,
)

FAST = QuadOptions(nodes_per_period=24.0, min_nodes=256)


def packet_1d(m=1.0, r1=0.3, r2=0.45, gamma=0.0):
    return MomentumWavePacket(m, FourVector(m, 0, 0, 0), gamma, BumpProfile(r1, r2), spatial_dim=1)


class TestEvaluatePosition:
    def test_static_value_matches_dense_oracle(self):
        # dense-grid oracle at 4x resolution
        pk = packet_1d()
        base = evaluate_position(pk, ZERO, 1.0)
        dense = evaluate_position(pk, ZERO, 1.0, refine=4.0)
        assert base.imag == pytest.approx(0.0, abs=1e-12)
        assert base.real > 0
        assert abs(base - dense) / abs(dense) < 1e-9

    def test_static_value_matches_dense_oracle_3d(self):
        pk = rest_packet(r1=0.3, r2=0.45, spatial_dim=3)
        base = evaluate_position(pk, ZERO, 1.0)
        dense = evaluate_position(pk, ZERO, 1.0, refine=4.0)
        assert base.real > 0 and abs(base.imag) < 1e-12
        assert abs(base - dense) / abs(dense) < 1e-8

    def test_even_profile_symmetries(self):
        pk = rest_packet(r1=0.3, r2=0.45, spatial_dim=3)
        x = FourVector(7.0, 2.0, -1.0, 0.5)
        reflected = FourVector(7.0, -2.0, 1.0, -0.5)
        timeflip = FourVector(-7.0, 2.0, -1.0, 0.5)
        a = evaluate_position(pk, x, 7.0)
        assert abs(evaluate_position(pk, reflected, 7.0) - a) < 1e-12
        assert abs(evaluate_position(pk, timeflip, 7.0) - np.conj(a)) < 1e-12

    def test_linearity_in_profile_amplitude(self):
        # doubling the profile amplitude doubles the sum (kernel level)
        nodes = np.linspace(-0.45, 0.45, 301)
        w = np.full(301, 0.9 / 300)
        a = packet_phase_sum_1d(nodes, w, 0.0, 1.0, 0.0, 0.3, 0.45, 5.0, 2.0)
        b = packet_phase_sum_1d(nodes, 2.0 * w, 0.0, 1.0, 0.0, 0.3, 0.45, 5.0, 2.0)
        assert abs(b - 2.0 * a) < 1e-14

    def test_magnitude_bounded_by_static_value(self):
        pk = packet_1d(gamma=0.05)
        bound = abs(evaluate_position(pk, ZERO, 5.0))
        for x in (FourVector(5.0, 2.0, 0, 0), FourVector(3.0, -4.0, 0, 0), FourVector(10.0, 8.0, 0, 0)):
            assert abs(evaluate_position(pk, x, 5.0)) <= bound * (1 + 1e-9)

    def test_grid_refinement_stability(self):
        pk = packet_1d()
        for tau in (20.0, 90.0):
            x = FourVector(tau, 0.4 * tau, 0, 0)
            a = evaluate_position(pk, x, tau, FAST)
            b = evaluate_position(pk, x, tau, FAST, refine=2.0)
            assert abs(a - b) <= 1e-6 * max(abs(a), abs(b), 1e-30)

    def test_node_budget_error(self):
        pk = packet_1d()
        with pytest.raises(QuadratureError, match="nodes"):
            evaluate_position(pk, FourVector(1e6, 1e6, 0, 0), 1.0, QuadOptions(max_nodes_per_axis=100))

    def test_gamma_requires_positive_tau(self):
        pk = packet_1d(gamma=0.1)
        with pytest.raises(ValueError, match="tau"):
            evaluate_position(pk, ZERO, 0.0)


class TestNormalizer:
    def test_modulus(self):
        for tau in (3.0, 17.0):
            val = oncone_normalizer(1.0, tau, 1.5)
            assert abs(val) == pytest.approx(2.0 * (2 * math.pi * tau) ** 1.5, rel=1e-12)

    def test_argument(self):
        m, tau, e = 1.3, 5.0, 1.5
        val = oncone_normalizer(m, tau, e)
        expected = (m * tau + 0.5 * math.pi * e) % (2 * math.pi)
        assert math.atan2(val.imag, val.real) % (2 * math.pi) == pytest.approx(expected, abs=1e-10)

    def test_exponent_zero(self):
        m, tau = 0.7, 9.0
        val = oncone_normalizer(m, tau, 0.0)
        assert val == pytest.approx(2 * m * complex(math.cos(m * tau), math.sin(m * tau)))


class TestOnConeLimit:
    def test_converges_with_half_power_in_1d(self):
        pk = packet_1d(r1=0.6, r2=1.4)
        rep = oncone_limit_check(pk, FourVector(1.0, 0, 0, 0), np.geomspace(20, 200, 10), 0.5)
        assert rep.converged
        assert max(rep.final_window()) <= 0.05

    def test_wrong_exponent_drifts(self):
        pk = packet_1d(r1=0.6, r2=1.4)
        rep = oncone_limit_check(pk, FourVector(1.0, 0, 0, 0), np.geomspace(20, 200, 10), 2.0 / 3.0)
        assert not rep.converged

    def test_outside_support_goes_to_zero(self):
        # boost direction so that m*v lands outside the profile support
        pk = packet_1d(r1=0.2, r2=0.3)
        v = FourVector(math.sqrt(1.0 + 0.8**2), 0.8, 0.0, 0.0)
        rep = oncone_limit_check(pk, v, np.geomspace(30, 120, 6), 0.5)
        assert rep.target == 0
        assert abs(rep.scaled[-1]) < abs(rep.scaled[0])

    def test_requires_zero_gamma_and_unit_v(self):
        pk = packet_1d(gamma=0.1)
        with pytest.raises(ValueError, match="gamma"):
            oncone_limit_check(pk, FourVector(1.0, 0, 0, 0), [10.0, 20.0], 0.5)
        with pytest.raises(ValueError, match="timelike"):
            oncone_limit_check(packet_1d(), FourVector(2.0, 0, 0, 0), [10.0, 20.0], 0.5)


class TestFalloffFit:
    def test_oncone_power_half_in_1d(self):
        pk = packet_1d(r1=0.6, r2=1.4)
        fit = falloff_fit(pk, FourVector(1.0, 0, 0, 0), np.geomspace(20, 200, 12), gamma=0.0, opts=FAST)
        assert fit.kind == "power"
        assert fit.exponent_or_rate == pytest.approx(0.5, abs=0.1)

    def test_offcone_superpoly(self):
        pk = packet_1d(r1=0.1, r2=1.0)
        fit = falloff_fit(pk, FourVector(1.0, 2.8, 0, 0), np.geomspace(8, 80, 16), gamma=0.0, opts=FAST)
        assert fit.kind == "superpoly"
        ws = fit.windowed_exponents
        assert all(b > a for a, b in zip(ws, ws[1:]))
        assert ws[-1] > 6.0

    def test_offcone_exponential_alpha_stable(self):
        pk = packet_1d(r1=0.6, r2=0.8)
        u = FourVector(1.0, 0.70, 0.0, 0.0)
        fits = {}
        for g, tmax in ((0.1, 260.0), (0.2, 130.0)):
            fits[g] = falloff_fit(pk, u, np.geomspace(40, tmax, 10), gamma=g, opts=FAST)
        assert all(f.kind == "exponential" for f in fits.values())
        a1, a2 = fits[0.1].alpha, fits[0.2].alpha
        assert a1 > 0 and a2 > 0
        assert abs(a1 - a2) / max(a1, a2) <= 0.2


class TestCertificate:
    def setup_method(self):
        self.pk = MomentumWavePacket(
            1.0, FourVector(1, 0, 0, 0), 0.15, BumpProfile(0.45, 0.65), spatial_dim=3
        )

    def test_granted_small_alpha(self):
        cert = contour_certificate(self.pk, FourVector(0.0, 0.5, 0, 0), 0.1)
        assert cert.granted
        assert cert.max_im_q < self.pk.mass

    def test_certified_rate_is_sound(self):
        # window ends before the profile-edge tail takes over
        u = FourVector(0.0, 0.5, 0, 0)
        cert = contour_certificate(self.pk, u, 0.12)
        assert cert.granted
        fit = falloff_fit(self.pk, u, np.geomspace(5, 16, 8), gamma=0.15, opts=FAST)
        assert fit.kind == "exponential"
        assert fit.exponent_or_rate >= 0.9 * cert.alpha * self.pk.gamma

    def test_plateau_denial(self):
        cert = contour_certificate(self.pk, FourVector(0.0, 0.5, 0, 0), 0.5)
        assert not cert.granted
        assert "plateau" in cert.reason

    def test_shift_denial_reports_momentum(self):
        hard = MomentumWavePacket(1.0, FourVector(1, 0, 0, 0), 0.5, BumpProfile(0.45, 0.65), 3)
        cert = contour_certificate(hard, FourVector(0.0, 0.05, 0, 0), 0.2)
        assert not cert.granted
        assert cert.violating_q is not None

    def test_hole_exclusion(self):
        with pytest.raises(HoleExcludedError):
            contour_certificate(self.pk, FourVector(0.0, 1e-3, 0, 0), 0.1)

    def test_requires_rest_frame_and_width(self):
        moving = MomentumWavePacket(
            1.0, FourVector(math.sqrt(1.04), 0.2, 0, 0), 0.1, BumpProfile(0.3, 0.5), 3
        )
        with pytest.raises(ValueError, match="rest frame"):
            contour_certificate(moving, FourVector(0.0, 0.5, 0, 0), 0.05)
        with pytest.raises(ValueError, match="gamma"):
            contour_certificate(self.pk.with_gamma(0.0), FourVector(0.0, 0.5, 0, 0), 0.05)


def test_backend_agreement():
    nodes = np.linspace(-0.5, 0.5, 257)
    w = np.full(257, 1.0 / 257)
    args = (nodes, w, 0.1, 1.0, 0.3, 0.2, 0.5, 40.0, 13.0)
    a = packet_phase_sum_1d(*args)
    b = numpy_backend.packet_phase_sum_1d(*args)
    assert abs(a - b) < 1e-13

    rng = np.random.default_rng(3)
    nodes3 = [np.linspace(-0.4, 0.4, 41) for _ in range(3)]
    wts3 = [np.full(41, 0.02) for _ in range(3)]
    from scatkit.kernels import packet_phase_sum_3d

    args3 = (
        nodes3[0], wts3[0], nodes3[1], wts3[1], nodes3[2], wts3[2],
        np.zeros(3), 1.0, 0.7, 0.25, 0.4, 21.0, np.array([4.0, -3.0, 1.0]),
    )
    assert abs(packet_phase_sum_3d(*args3) - numpy_backend.packet_phase_sum_3d(*args3)) < 1e-13

    from scatkit.kernels import plane_wave_sum

    pts = rng.normal(size=(500, 2))
    coeffs = rng.normal(size=500) + 1j * rng.normal(size=500)
    qr = np.array([0.3, -1.2])
    qi = np.array([0.05, 0.02])
    assert abs(plane_wave_sum(pts, coeffs, qr, qi) - numpy_backend.plane_wave_sum(pts, coeffs, qr, qi)) < 1e-10

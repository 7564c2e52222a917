import numpy as np
import pytest

from scatkit.errors import GrowthError, TruncationError
from scatkit.packets import BumpProfile
from scatkit.transforms import (
    HoleSpec,
    MuForm,
    ScatteringModelF,
    TRSampleGrid,
    TSampleGrid,
    cone_split,
    forward_T,
    hefer_factor,
    inverse_F,
    sample_T_line,
    sample_T_radial_2d,
    split_F,
)

BUMP = ScatteringModelF("bump", l=1, envelope=BumpProfile(0.5, 1.5))
MU = MuForm.diagonal_quadratic([1.0])


@pytest.fixture(scope="module")
def bump_grid():
    v = np.arange(-300.0, 300.0001, 0.08)
    return TSampleGrid([v], sample_T_line(BUMP, MU, v, [0.0]))


@pytest.fixture(scope="module")
def split_tables():
    h = 0.015
    vs = np.arange(-60.0 + h / 2, 60.0, h)
    built = {}
    for gamma0 in (0.5, 0.3):
        r_axis = np.arange(0.0, gamma0 * 60 + 1.0001, 0.05)
        built[gamma0] = TRSampleGrid(vs, r_axis, sample_T_line(BUMP, MU, vs, r_axis))
    return built


class TestForward:
    def test_static_value_matches_dense_grid(self):
        from scatkit.transforms import TransformOptions

        base = forward_T(BUMP, MU, [0.0], 0.0)
        dense = forward_T(BUMP, MU, [0.0], 0.0, TransformOptions(min_nodes=4096))
        assert base.imag == pytest.approx(0.0, abs=1e-12)
        assert abs(base - dense) < 1e-6

    def test_real_even_model_conjugates_under_reflection(self):
        a = forward_T(BUMP, MU, [3.7], 0.2)
        b = forward_T(BUMP, MU, [-3.7], 0.2)
        assert abs(a - np.conj(b)) < 1e-12

    def test_damping_bounded_by_total_variation(self):
        # damping factor <= 1 pointwise, so |T| never exceeds the
        # total-variation integral of the profile at any damping level
        from scatkit.transforms import TransformOptions

        x, w = np.polynomial.legendre.leggauss(2048)
        q = 1.5 * x
        tv = float(np.sum(1.5 * w * np.abs(BUMP.value(q[:, None]))))
        for v in (0.0, 2.0, 11.0):
            for r in (0.0, 0.4, 1.5):
                assert abs(forward_T(BUMP, MU, [v], r)) <= tv + 1e-9

    def test_damping_monotone_without_oscillation(self):
        # at v = 0 the integrand is positive, so damping is monotone
        vals = [abs(forward_T(BUMP, MU, [0.0], r)) for r in (0.0, 0.5, 1.5)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_r_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            forward_T(BUMP, MU, [0.0], -0.1)


class TestInverse:
    def test_round_trip_on_support(self, bump_grid):
        worst = 0.0
        for q in np.linspace(-1.8, 1.8, 25):
            rec = inverse_F(bump_grid, [q]).value
            worst = max(worst, abs(rec - complex(BUMP.value([[q]]))))
        assert worst <= 1e-6

    def test_outside_support_small(self, bump_grid):
        assert abs(inverse_F(bump_grid, [2.3]).value) <= 1e-6

    def test_linearity(self, bump_grid):
        doubled = TSampleGrid(bump_grid.axes, 2.0 * bump_grid.values)
        q = [0.4]
        assert abs(inverse_F(doubled, q).value - 2.0 * inverse_F(bump_grid, q).value) < 1e-12

    def test_truncation_guard(self):
        v = np.arange(-8.0, 8.0001, 0.05)
        samples = TSampleGrid([v], sample_T_line(BUMP, MU, v, [0.0]))
        with pytest.raises(TruncationError):
            inverse_F(samples, [0.0])

    def test_round_trip_2d_radial(self):
        model = ScatteringModelF("bump", l=2, envelope=BumpProfile(0.4, 1.0))
        ax = np.arange(-260.0, 260.0001, 0.5)
        grid = TSampleGrid([ax, ax], sample_T_radial_2d(model, [ax, ax]))
        worst = 0.0
        for q in ([0.0, 0.0], [0.3, 0.1], [-0.5, 0.6], [0.9, 0.0]):
            worst = max(worst, abs(inverse_F(grid, q).value - complex(model.value([q]))))
        assert worst <= 1e-6


class TestHefer:
    def test_quadratic_closed_form(self):
        mu = MuForm.diagonal_quadratic([1.0])
        rho = hefer_factor(mu, [0.7], [-0.3])
        assert rho[0] == pytest.approx(0.7 + (-0.3))

    def test_componentwise_diagonal(self):
        mu = MuForm.diagonal_quadratic([2.0, 0.5])
        q = np.array([0.3, -1.1])
        q2 = np.array([-0.7, 0.4])
        rho = hefer_factor(mu, q, q2)
        assert np.allclose(rho, [2.0 * (q[0] + q2[0]), 0.5 * (q[1] + q2[1])])

    @pytest.mark.parametrize("l", [1, 2])
    def test_random_degree_four_identity(self, l):
        rng = np.random.default_rng(7 + l)
        terms = {}
        for _ in range(6):
            exps = tuple(int(e) for e in rng.integers(0, 3, size=l))
            if sum(exps) == 0 or sum(exps) > 4:
                continue
            terms[exps] = float(rng.normal())
        terms[tuple([4] + [0] * (l - 1))] = 0.3
        mu = MuForm.from_dict(terms, l)
        worst = 0.0
        for _ in range(1000):
            a = rng.normal(size=l)
            b = rng.normal(size=l)
            rho = hefer_factor(mu, a, b)
            lhs = complex(mu(a.reshape(1, -1))) - complex(mu(b.reshape(1, -1)))
            worst = max(worst, abs(lhs - complex(rho @ (a - b))))
        assert worst <= 1e-12

    def test_mu_requires_no_constant(self):
        with pytest.raises(ValueError, match="constant"):
            MuForm.from_dict({(0,): 1.0}, 1)


class TestSplit:
    def test_identity_against_direct_inversion(self, bump_grid, split_tables):
        worst = 0.0
        for q in (0.0, 0.1, -0.3):
            s = split_F(split_tables[0.5], MU, 0.5, [q])
            direct = inverse_F(bump_grid, [q]).value
            worst = max(worst, abs(s.total - direct))
        assert worst <= 1e-5

    def test_gamma0_independence(self, split_tables):
        a = split_F(split_tables[0.5], MU, 0.5, [0.1]).total
        b = split_F(split_tables[0.3], MU, 0.3, [0.1]).total
        assert abs(a - b) <= 1e-5

    def test_complex_q_finite_and_grid_stable(self, split_tables):
        q = [0.05 + 0.03j]
        a = split_F(split_tables[0.5], MU, 0.5, q).total
        b = split_F(split_tables[0.3], MU, 0.3, q).total
        assert np.isfinite(a.real) and np.isfinite(a.imag)
        assert abs(a - b) <= 1e-4

    def test_growth_violation_names_edge(self, split_tables):
        with pytest.raises(GrowthError, match=r"\|v\|"):
            split_F(split_tables[0.5], MU, 0.5, [0.0 + 1.5j])

    def test_r_axis_must_cover(self):
        vs = np.arange(-10.0 + 0.05, 10.0, 0.1)
        r_axis = np.arange(0.0, 1.0, 0.1)
        with pytest.raises(ValueError, match="r axis"):
            split_F(TRSampleGrid(vs, r_axis, np.zeros((vs.size, r_axis.size))), MU, 0.5, [0.0])


@pytest.fixture(scope="module")
def pole_grid():
    model = ScatteringModelF("pole", l=1, eps=0.05)
    h = 0.004
    v = np.arange(-400.0 + h / 2, 400.0, h)
    return model, TSampleGrid([v], model.pole_T(v))


class TestConeSplit:
    def test_pole_reconstruction_on_real_axis(self, pole_grid):
        model, grid = pole_grid
        hole = HoleSpec([1.0], 0.4)
        worst = 0.0
        for q in (-0.3, -0.1, 0.0, 0.2, 0.35):
            res = cone_split(grid, hole, [q])
            assert res.convergent
            worst = max(worst, abs(res.total - 1.0 / (q + 1j * model.eps)))
        assert worst <= 1e-4

    def test_complex_q_inside_cone_converges(self, pole_grid):
        _, grid = pole_grid
        res = cone_split(grid, HoleSpec([1.0], 0.4), [0.05 + 0.02j])
        assert res.convergent
        assert np.isfinite(res.F_H.real)

    def test_opposite_cone_rejected(self, pole_grid):
        _, grid = pole_grid
        res = cone_split(grid, HoleSpec([1.0], 0.4), [0.05 - 0.02j])
        assert not res.convergent
        assert res.F_H is None
        with pytest.raises(ValueError):
            _ = res.total

    def test_boundary_value_from_inside(self, pole_grid):
        model, grid = pole_grid
        res = cone_split(grid, HoleSpec([1.0], 0.4), [0.05 + 1e-6j])
        ref = 1.0 / (0.05 + 1j * model.eps)
        assert abs(res.total - ref) <= 1e-3

    def test_analyticity_probe_cauchy_riemann(self, pole_grid):
        # 4-point complex stencil around a point inside the cone
        _, grid = pole_grid
        hole = HoleSpec([1.0], 0.4)
        q0, d = 0.1 + 0.05j, 1e-3

        def FH(q):
            return cone_split(grid, hole, [q]).F_H

        ddx = (FH(q0 + d) - FH(q0 - d)) / (2 * d)
        ddy = (FH(q0 + 1j * d) - FH(q0 - 1j * d)) / (2j * d)
        assert abs(ddx - ddy) <= 1e-3 * max(1.0, abs(ddx))

    def test_shrinking_hole_2d(self):
        model = ScatteringModelF("bump", l=2, envelope=BumpProfile(0.4, 1.0))
        ax = np.arange(-120.0, 120.0001, 0.4)
        grid = TSampleGrid([ax, ax], sample_T_radial_2d(model, [ax, ax]))
        full = inverse_F(grid, [0.2, 0.0], truncation_tol=1.0).value
        sizes = []
        for theta in (0.6, 0.3, 0.15):
            res = cone_split(grid, HoleSpec([1.0, 0.0], theta), [0.2, 0.0])
            assert res.convergent
            sizes.append(abs(res.F_H))
            assert abs((res.F_H + res.F_A) - full) < 1e-6
        assert sizes[0] > sizes[1] > sizes[2]


def test_hole_spec_validation():
    with pytest.raises(ValueError):
        HoleSpec([1.0], 2.0)
    with pytest.raises(ValueError):
        HoleSpec([0.0], 0.3)

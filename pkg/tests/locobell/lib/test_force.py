
import pytest
import numpy as np

from numpy.testing import assert_allclose

from locobell._simple_systems.simple_systems import concentric_disks
from locobell.lib.exceptions import NoDataError, SingularIntegrand
from locobell.lib.force import (
    ForceProfile, force_determinant, force_integral, force_profile, inner_exponent)
from locobell.lib.geometry import LEFT, RIGHT
from locobell.lib.presets import bmo_domain, boundary_data


@pytest.fixture(scope='module')
def strip():
    return bmo_domain(epsilon=0.5)


@pytest.fixture(scope='module')
def exp_data(strip):
    return boundary_data(strip, "exp")


class TestForceIntegral:

    @pytest.mark.parametrize('t', [-1.0, 0.0, 1.5])
    def test_closed_forms(self, strip, exp_data, t):

        epsilon = 0.5
        reference = {
            'right': -epsilon ** 2 * np.exp(t) / (1 + epsilon),
            'left': epsilon ** 2 * np.exp(t) / (1 - epsilon),
        }

        right, right_converged = force_integral(strip, exp_data, t, side=RIGHT)
        left, left_converged = force_integral(strip, exp_data, t, side=LEFT)

        assert right_converged and left_converged
        assert right == pytest.approx(reference['right'], rel=1e-5)
        assert left == pytest.approx(reference['left'], rel=1e-5)

    @pytest.mark.parametrize('name', ["linear", "affine", "square"])
    def test_affine_data(self, strip, name):

        curve = boundary_data(strip, name)
        for side in (LEFT, RIGHT):
            value, converged = force_integral(strip, curve, 0.3, side=side)
            assert abs(value) < 1e-10
            assert converged

    def test_full_output(self, strip, exp_data):

        result = force_integral(strip, exp_data, 0.0, full_output=True)

        assert result.converged
        assert result.truncation < 0.0
        assert result.tail < 1e-7 * max(1.0, abs(result.value))

    def test_truncation_doubling(self, strip, exp_data):

        coarse = force_integral(strip, exp_data, 0.0, tol=1e-5, full_output=True)
        fine = force_integral(strip, exp_data, 0.0, tol=1e-8, full_output=True)

        assert abs(coarse.value - fine.value) <= 10 * coarse.tail + 1e-9

    def test_no_sweeps(self, strip, exp_data):
        assert force_integral(strip, exp_data, 0.0, max_sweeps=0) == (0.0, False)

    def test_singular(self):

        # from g(pi / 3) the right tangent to the unit disk is vertical
        disks = concentric_disks()
        curve = boundary_data(disks, "exp")
        with pytest.raises(SingularIntegrand):
            force_integral(disks, curve, np.pi / 3, side=RIGHT)


class TestForceIntegralExceptions:

    def test_side(self, strip, exp_data):
        match = "'side' must be either 'left' or 'right'"
        with pytest.raises(ValueError, match=match):
            force_integral(strip, exp_data, 0.0, side="up")

    def test_max_sweeps(self, strip, exp_data):
        match = "'max_sweeps' must be greater than or equal to 0"
        with pytest.raises(ValueError, match=match):
            force_integral(strip, exp_data, 0.0, max_sweeps=-1)

    def test_not_smooth(self, strip):
        curve = boundary_data(strip, "indicator")
        with pytest.raises(ValueError, match="is not three times differentiable"):
            force_integral(strip, curve, 0.0)


class TestDeterminant:

    @pytest.mark.parametrize('name, params, third', [
        ("exp", {}, np.exp),
        ("power", {"p": 4, "sign": -1}, lambda t: -24 * t),
        ("sin", {}, lambda t: -np.cos(t)),
    ])
    def test_parabola(self, strip, name, params, third):

        curve = boundary_data(strip, name, **params)
        t = np.linspace(-2.3, 2.9, 40)

        assert_allclose(force_determinant(curve, t), 2 * third(t), rtol=1e-9)

    def test_inner_exponent(self, strip):

        # on the strip the rate of the right exponent is -1 / epsilon
        assert inner_exponent(strip, 0.0, -1.0, side=RIGHT) == pytest.approx(-2.0, rel=1e-7)
        assert inner_exponent(strip, 0.0, 1.0, side=LEFT) == pytest.approx(-2.0, rel=1e-7)
        assert inner_exponent(strip, 0.4, 0.4) == 0.0


class TestForceProfile:

    @pytest.mark.parametrize('side', [RIGHT, LEFT])
    def test_profile(self, strip, exp_data, side):

        t_grid = np.array([0.5, -1.0, 0.0, 1.0])
        profile = force_profile(strip, exp_data, t_grid, side=side)

        epsilon = 0.5
        if side == RIGHT:
            reference = -epsilon ** 2 * np.exp(t_grid) / (1 + epsilon)
        else:
            reference = epsilon ** 2 * np.exp(t_grid) / (1 - epsilon)

        assert_allclose(profile.values, reference, rtol=1e-5)
        assert profile.converged.all()

    def test_right_profile_decreasing(self, strip, exp_data):

        t_grid = np.linspace(-2, 2, 9)
        profile = ForceProfile(strip, exp_data, t_grid, side=RIGHT).run()

        assert np.all(profile.values < 0)
        assert np.all(np.diff(profile.values) < 0)

    def test_singular_point_flagged(self):

        disks = concentric_disks()
        curve = boundary_data(disks, "exp")
        profile = ForceProfile(disks, curve, [0.0, 0.5, np.pi / 3], side=RIGHT, max_sweeps=2).run()

        assert np.all(np.isfinite(profile.values[:2]))
        assert np.isnan(profile.values[2])
        assert not profile.converged[2]

    def test_dataframe(self, strip, exp_data):

        profile = ForceProfile(strip, exp_data, [0.0, 1.0]).run()
        df = profile.to_dataframe()

        assert list(df.columns) == ["t", "value", "converged", "truncation"]
        assert len(df) == 2

    def test_no_data(self, strip, exp_data):
        profile = ForceProfile(strip, exp_data, [0.0, 1.0])
        with pytest.raises(NoDataError):
            profile.to_dataframe()

    def test_empty_grid(self, strip, exp_data):
        match = "'t_grid' must not be empty"
        with pytest.raises(ValueError, match=match):
            ForceProfile(strip, exp_data, [])

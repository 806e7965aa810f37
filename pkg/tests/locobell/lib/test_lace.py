
import pytest
import numpy as np

from numpy.testing import assert_allclose, assert_array_equal

from locobell.lib.exceptions import TooManyChanges
from locobell.lib.lace import (
    MINUS_TO_PLUS, PLUS_TO_MINUS,
    Chord, LiftedCurve, chord_differential_inequalities, cup_equation_residual, midpoint_derivative_residual,
    solve_cup_chords, torsion_determinant, torsion_sign, torsion_sign_changes,
)
from locobell.lib.presets import bmo_domain, boundary_data


@pytest.fixture(scope='module')
def strip():
    return bmo_domain(epsilon=1.0)


class TestTorsion:

    @pytest.mark.parametrize('name, params, third', [
        ("power", {"p": 3}, lambda t: np.full_like(t, 6.0)),
        ("power", {"p": 4, "sign": -1}, lambda t: -24 * t),
        ("sin", {}, lambda t: -np.cos(t)),
        ("exp", {}, np.exp),
    ])
    def test_torsion_identity(self, strip, name, params, third):

        curve = boundary_data(strip, name, **params)
        t = np.linspace(-3, 3, 200)

        # on the parabolic strip the determinant is exactly 2 f'''
        assert_allclose(torsion_determinant(curve, t), 2 * third(t), rtol=1e-9, atol=1e-12)

        outside_band = np.abs(third(t)) > 1e-6
        assert_array_equal(torsion_sign(curve, t)[outside_band], np.sign(third(t))[outside_band])

    def test_scalar_sign(self, strip):
        curve = boundary_data(strip, "exp")
        assert torsion_sign(curve, 0.0) == 1

    def test_affine_has_no_torsion(self, strip):
        curve = boundary_data(strip, "linear")
        assert torsion_sign_changes(curve, (-2, 2)) == []

    def test_single_cup(self, strip):

        curve = boundary_data(strip, "power", p=4, sign=-1)
        changes = torsion_sign_changes(curve, (-2, 2))

        assert len(changes) == 1
        assert changes[0].location == pytest.approx(0.0, abs=1e-9)
        assert changes[0].direction == PLUS_TO_MINUS
        assert changes[0].cup

    def test_sin_cups(self, strip):

        curve = boundary_data(strip, "sin")
        changes = torsion_sign_changes(curve, (-7, 7))

        reference = {
            'locations': [-3 * np.pi / 2, -np.pi / 2, np.pi / 2, 3 * np.pi / 2],
            'directions': [MINUS_TO_PLUS, PLUS_TO_MINUS, MINUS_TO_PLUS, PLUS_TO_MINUS],
            'cups': [-np.pi / 2, 3 * np.pi / 2],
        }

        assert_allclose([change.location for change in changes], reference['locations'], atol=1e-8)
        assert [change.direction for change in changes] == reference['directions']
        assert_allclose([change.location for change in changes if change.cup], reference['cups'], atol=1e-8)

    def test_too_many_changes(self, strip):
        curve = boundary_data(strip, "sin", omega=10)
        with pytest.raises(TooManyChanges):
            torsion_sign_changes(curve, (-20, 20), max_changes=4)

    def test_not_smooth(self, strip):
        curve = boundary_data(strip, "indicator")
        match = "is not three times differentiable"
        with pytest.raises(ValueError, match=match):
            torsion_sign_changes(curve, (-2, 2))

    def test_grid(self, strip):
        curve = boundary_data(strip, "exp")
        match = "'grid' must be at least 2"
        with pytest.raises(ValueError, match=match):
            torsion_sign_changes(curve, (-2, 2), grid=1)


class TestCupEquation:

    @pytest.mark.parametrize('name, params', [
        ("power", {"p": 4, "sign": -1}),
        ("sin", {}),
    ])
    def test_parabolic_reduction(self, strip, name, params):

        curve = boundary_data(strip, name, **params)
        a, b = np.meshgrid(np.linspace(-2, 2, 50), np.linspace(-1.9, 2.1, 50), indexing="ij")

        general = cup_equation_residual(curve, a, b)
        parabolic = midpoint_derivative_residual(curve, a, b)

        # the general determinant is 2 (b - a)^2 times the parabolic residual
        assert_allclose(general, 2 * (b - a) ** 2 * parabolic, rtol=1e-9, atol=1e-10)

        # so both have the same zero set away from the threshold
        clear = (np.abs(parabolic) < 1e-10) | (np.abs(parabolic) > 1e-4)
        assert_array_equal((np.abs(general) < 1e-8)[clear], (np.abs(parabolic) < 1e-8)[clear])

    def test_symmetric(self, strip):
        curve = boundary_data(strip, "sin")
        assert cup_equation_residual(curve, 0.3, 1.7) == pytest.approx(cup_equation_residual(curve, 1.7, 0.3))


class TestCupChords:

    @staticmethod
    @pytest.fixture(scope='class')
    def chords(strip):
        curve = boundary_data(strip, "power", p=4, sign=-1)
        return solve_cup_chords(curve, origin=0.0, search_window=(-3, 3), domain=strip)

    def test_symmetric_chords(self, chords):

        a = np.array([chord.a for chord in chords])
        b = np.array([chord.b for chord in chords])

        assert len(chords) > 10
        assert np.all(a < 0) and np.all(b > 0)
        assert_allclose(a, -b, atol=1e-6)

    def test_family_ends_on_inner_boundary(self, chords):

        # the chord at height b^2 touches x2 = x1^2 + 1 when b = 1
        assert chords[-1].b == pytest.approx(1.0, abs=1e-3)

    def test_residuals(self, chords):
        for chord in chords:
            assert abs(chord.residual) <= 1e-8 * (chord.b - chord.a) ** 4 + 1e-12

    def test_tolerance_is_scaled(self, strip):

        # the tolerance bounds the residual divided by (b - a)^4, not the raw determinant
        curve = boundary_data(strip, "power", p=4, sign=-1)
        chords = solve_cup_chords(curve, origin=0.0, search_window=(-3, 3), tol=1e-10)

        for chord in chords:
            assert abs(chord.residual) / (chord.b - chord.a) ** 4 <= 1e-10

    def test_differential_inequalities(self, strip, chords):

        curve = boundary_data(strip, "power", p=4, sign=-1)
        chord = chords[len(chords) // 2]

        at_a, at_b = chord_differential_inequalities(curve, chord)

        assert at_a == pytest.approx(chord.diff_ineq_a)
        assert at_b == pytest.approx(chord.diff_ineq_b)
        assert chord_differential_inequalities(curve, (chord.a, chord.b)) == (at_a, at_b)
        assert chord.admissible() == (at_a <= -1e-12 and at_b <= -1e-12)

    @pytest.mark.parametrize('name, params, sign, admissible', [
        ("power", {"p": 4, "sign": -1}, -1, True),
        ("power", {"p": 4, "sign": 1}, 1, False),
        ("affine", {"c0": 1, "c1": 2, "c2": 3}, 0, False),
    ])
    def test_differential_inequality_signs(self, strip, name, params, sign, admissible):

        curve = boundary_data(strip, name, **params)
        at_a, at_b = chord_differential_inequalities(curve, (-0.5, 0.5))

        if sign == 0:
            # the lifted curve of affine data is planar
            assert at_a == pytest.approx(0.0, abs=1e-12)
            assert at_b == pytest.approx(0.0, abs=1e-12)
        else:
            assert np.sign(at_a) == sign and np.sign(at_b) == sign
            assert at_a == pytest.approx(at_b)

        chord = Chord(a=-0.5, b=0.5, residual=0.0, diff_ineq_a=at_a, diff_ineq_b=at_b)
        assert chord.admissible() is admissible

    def test_no_cup(self, strip):
        curve = boundary_data(strip, "linear")
        assert solve_cup_chords(curve, origin=0.0, search_window=(-3, 3)) == []

    def test_wrong_direction(self, strip):
        # the torsion of sin changes from - to + at pi / 2
        curve = boundary_data(strip, "sin")
        assert solve_cup_chords(curve, origin=np.pi / 2, search_window=(-7, 7)) == []


class TestSinCupChords:

    @pytest.mark.parametrize('epsilon', [0.5, 1.0, 2.0])
    def test_families(self, epsilon):

        domain = bmo_domain(epsilon)
        curve = boundary_data(domain, "sin")
        cups = [change.location for change in torsion_sign_changes(curve, (-2, 6)) if change.cup]

        assert_allclose(cups, [-np.pi / 2, 3 * np.pi / 2], atol=1e-8)

        for origin in cups:
            chords = solve_cup_chords(curve, origin, search_window=(-8, 10), domain=domain)
            a = np.array([chord.a for chord in chords])
            b = np.array([chord.b for chord in chords])

            # sin is even about each cup, so the chords are centred on it
            assert len(chords) > 10
            assert_allclose(a + b, 2 * origin, atol=1e-6)
            assert all(chord.admissible() for chord in chords[5:])

            # the last chord touches the inner boundary, where (b - a)^2 / 4 = epsilon^2
            assert b[-1] - a[-1] == pytest.approx(2 * epsilon, abs=1e-3)


class TestLiftedCurve:

    def test_gamma(self, strip):

        curve = boundary_data(strip, "exp")

        assert_allclose(curve.gamma(1.0), [1.0, 1.0, np.e])
        assert curve.gamma(np.zeros(4)).shape == (4, 3)

    def test_lower_bound(self, strip):
        match = "'lower_bound' must not exceed the sampled boundary data"
        with pytest.raises(ValueError, match=match):
            LiftedCurve(
                base=strip.outer,
                f_tilde=lambda t: np.asarray(t, dtype=float) ** 2,
                f_tilde_d1=lambda t: 2 * np.asarray(t, dtype=float),
                f_tilde_d2=lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
                f_tilde_d3=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                lower_bound=1.0,
            )

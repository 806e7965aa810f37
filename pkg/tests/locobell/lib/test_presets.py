
import pytest
import numpy as np

from numpy.testing import assert_allclose

from locobell._simple_systems.simple_systems import concentric_disks
from locobell.lib.exceptions import InvalidExponents, NoDataError, NotConvex
from locobell.lib.presets import (
    ClassCorrespondence,
    ap_domain, bmo_domain, boundary_data, class_correspondence_check, domain_from_spec, gehring_domain,
    muckenhoupt_domain, register_custom, reverse_jensen_domain, scalar_margins,
)
from locobell.lib.simulate import StepFunction, membership_check


class TestBMO:

    def test_contains(self):

        domain = bmo_domain(0.5)

        assert domain.params == {"epsilon": 0.5}
        assert domain.contains([1.0, 1.2])
        assert not domain.contains([1.0, 1.3])

    def test_epsilon(self):
        match = "'epsilon' must be greater than 0"
        with pytest.raises(ValueError, match=match):
            bmo_domain(0.0)


class TestAp:

    def test_contains(self):

        # A_2 with Q = 2 is the hyperbolic strip 1 <= x1 x2 <= 2
        domain = ap_domain(1, -1, 2)

        reference = {
            'inside': [1.5, 1.0],
            'beyond_inner': [2.0, 2.0],
            'beyond_outer': [0.5, 1.0],
        }

        assert domain.contains(reference['inside'])
        assert not domain.contains(reference['beyond_inner'])
        assert not domain.contains(reference['beyond_outer'])

    def test_muckenhoupt(self):
        domain = muckenhoupt_domain(2.0, 2.0)
        assert domain.params == {"p1": 1.0, "p2": -1.0, "Q": 2.0}

    def test_gehring(self):
        domain = gehring_domain(2.0, 1.5)
        assert domain.params == {"p1": 2.0, "p2": 1.0, "Q": 1.5}

    def test_touching(self):
        domain = ap_domain(1, -1, 1)
        assert domain.touching

    @pytest.mark.parametrize('p1, p2', [(1, 2), (1, 1), (0, -1)])
    def test_invalid_exponents(self, p1, p2):
        with pytest.raises(InvalidExponents):
            ap_domain(p1, p2, 2)

    def test_Q(self):
        match = "'Q' must be greater than or equal to 1"
        with pytest.raises(ValueError, match=match):
            ap_domain(1, -1, 0.5)

    def test_p(self):
        match = "'p' must be greater than 1"
        with pytest.raises(ValueError, match=match):
            muckenhoupt_domain(1.0, 2.0)
        with pytest.raises(ValueError, match=match):
            gehring_domain(0.5, 2.0)


class TestReverseJensen:

    @pytest.mark.parametrize('phi, inside, outside', [
        ("exp", [0.0, 1.5], [0.0, 2.5]),
        ("square", [1.0, 1.5], [1.0, 3.0]),
        ("power", [1.0, 1.5], [1.0, 3.0]),
    ])
    def test_contains(self, phi, inside, outside):

        domain = reverse_jensen_domain(phi, 2.0)

        assert domain.params["phi"] == phi
        assert domain.contains(inside)
        assert not domain.contains(outside)

    def test_callbacks(self):

        phi = (np.cosh, np.sinh, np.cosh, np.sinh)
        domain = reverse_jensen_domain(phi, 2.0)

        assert domain.params["phi"] == "custom"
        assert domain.contains([0.0, 1.5])

    def test_not_convex(self):

        phi = (
            lambda t: -np.asarray(t, dtype=float) ** 2,
            lambda t: -2 * np.asarray(t, dtype=float),
            lambda t: np.full_like(np.asarray(t, dtype=float), -2.0),
            lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        )
        with pytest.raises(NotConvex):
            reverse_jensen_domain(phi, 2.0)

    def test_Q(self):
        match = "'Q' must be greater than 1"
        with pytest.raises(ValueError, match=match):
            reverse_jensen_domain("exp", 1.0)

    def test_phi(self):
        match = "'phi' must be one of"
        with pytest.raises(ValueError, match=match):
            reverse_jensen_domain("cosh", 2.0)

    def test_r(self):
        match = "'r' must be greater than 1"
        with pytest.raises(ValueError, match=match):
            reverse_jensen_domain("power", 2.0, r=1.0)


class TestBoundaryData:

    @staticmethod
    @pytest.fixture(scope='class')
    def domain():
        return bmo_domain(1.0)

    @pytest.mark.parametrize('name, params, expected', [
        ("linear", {"a": 2, "b": 1}, lambda t: 2 * t + 1),
        ("affine", {"c0": 1, "c1": 2, "c2": 3}, lambda t: 1 + 2 * t + 3 * t ** 2),
        ("coordinate", {"i": 2}, lambda t: t ** 2),
        ("square", {}, lambda t: t ** 2),
        ("exp", {"lambda": 2}, lambda t: np.exp(2 * t)),
        ("power", {"p": 4, "sign": -1}, lambda t: -t ** 4),
        ("abs_power", {"p": 2.5}, lambda t: np.abs(t) ** 2.5),
        ("sin", {"a": 2, "omega": 3}, lambda t: 2 * np.sin(3 * t)),
        ("indicator", {}, lambda t: (np.abs(t) >= 1).astype(float)),
    ])
    def test_values(self, domain, name, params, expected):

        curve = boundary_data(domain, name, **params)
        t = np.linspace(-2, 2, 17)

        assert_allclose(curve.f_tilde(t), expected(t), rtol=1e-12, atol=1e-12)

    def test_string_params(self, domain):

        curve = boundary_data(domain, "power", p="4", sign="-1")

        assert curve.name == "power p=4 sign=-1"
        assert curve.f_tilde(2.0) == pytest.approx(-16.0)

    def test_lower_bounds(self, domain):

        reference = {
            'exp': 0.0,
            'sin': -1.0,
            'linear': None,
        }

        for name, lower in reference.items():
            assert boundary_data(domain, name).lower_bound == lower

    def test_smooth(self, domain):

        assert boundary_data(domain, "exp").smooth
        assert not boundary_data(domain, "indicator").smooth
        assert not boundary_data(domain, "abs_power", p=2.5).smooth

    def test_unknown_name(self, domain):
        match = "'name' must be one of"
        with pytest.raises(ValueError, match=match):
            boundary_data(domain, "gamma")

    def test_unknown_params(self, domain):
        match = "unknown parameters"
        with pytest.raises(ValueError, match=match):
            boundary_data(domain, "exp", mu=1)


class TestDomainFromSpec:

    def test_presets(self):

        reference = {
            'bmo': {"preset": "bmo", "epsilon": "0.5"},
            'ap': {"preset": "ap", "p1": "1", "p2": "-1", "Q": "2"},
            'reverse_jensen': {"preset": "reverse_jensen", "phi": "exp", "Q": "3"},
        }

        for name, spec in reference.items():
            assert domain_from_spec(spec).name == name

        assert domain_from_spec({"preset": "muckenhoupt", "p": "3", "Q": "2"}).params["p2"] == -0.5
        assert domain_from_spec({"preset": "gehring", "p": "2", "Q": "2"}).params["p1"] == 2.0

    def test_custom(self):

        def factory(outer="2", inner="1"):
            return concentric_disks(float(outer), float(inner))

        register_custom("test-disks", factory)
        domain = domain_from_spec({"preset": "custom", "name": "test-disks", "outer": "3"})

        assert domain.name == "disks"
        assert domain.params == {"outer": 3.0, "inner": 1.0}

    def test_unregistered(self):
        match = "no custom domain registered under the name 'nowhere'"
        with pytest.raises(ValueError, match=match):
            domain_from_spec({"preset": "custom", "name": "nowhere"})

    def test_missing_key(self):
        match = "'epsilon' is required by the 'bmo' preset"
        with pytest.raises(ValueError, match=match):
            domain_from_spec({"preset": "bmo"})

    def test_not_a_number(self):
        match = "'epsilon' must be a number, got 'abc'"
        with pytest.raises(ValueError, match=match):
            domain_from_spec({"preset": "bmo", "epsilon": "abc"})

    def test_unknown_preset(self):
        match = "'preset' must be one of"
        with pytest.raises(ValueError, match=match):
            domain_from_spec({"preset": "hardy"})


class TestScalarMargins:

    def test_bmo(self):

        # the margin is epsilon^2 minus the oscillation, which is the inner level at the average
        domain = bmo_domain(0.5)
        phi = StepFunction([0.0, 0.5, 1.0], [-1.0, 1.0], domain.outer)
        ends = phi.scan_ends(8)

        margins = scalar_margins(domain, phi, ends)
        _, worst = membership_check(domain, phi, window_grid=8)

        assert np.min(margins) == pytest.approx(-0.75)
        assert np.min(margins) == pytest.approx(worst)

    def test_ap(self):

        domain = ap_domain(1, -1, 2)
        phi = StepFunction([0.0, 0.5, 1.0], [1.0, 3.0], domain.outer)

        # <w> <1/w> over [0, 1] is 2 * 2/3 = 4/3
        margins = scalar_margins(domain, phi, np.array([0.0, 1.0]))
        assert margins[0] == pytest.approx(np.log(2) - np.log(4 / 3))

    def test_other_domain(self):
        domain = concentric_disks()
        phi = StepFunction([0.0, 1.0], [0.0], domain.outer)
        match = "'domain' must be a 'bmo', 'ap' or 'reverse_jensen' preset"
        with pytest.raises(ValueError, match=match):
            scalar_margins(domain, phi, np.array([0.0, 1.0]))


class TestClassCorrespondence:

    @pytest.mark.parametrize('domain', [
        bmo_domain(0.5),
        ap_domain(1, -1, 2),
        reverse_jensen_domain("exp", 2.0),
    ])
    def test_agreement(self, domain):

        report = class_correspondence_check(domain, samples=200, seed=0)

        assert report.verdict == "pass"
        assert report.details["agreement"] == 1.0
        assert len(report.table) == 200

    def test_members_and_non_members(self):

        check = ClassCorrespondence(bmo_domain(0.5), n_samples=200, seed=1).run()

        assert check.results["geometric"].any()
        assert not check.results["geometric"].all()

    def test_no_data(self):
        check = ClassCorrespondence(bmo_domain(0.5), n_samples=5)
        with pytest.raises(NoDataError):
            check.agreement

    def test_other_domain(self):
        match = "'domain' must be a 'bmo', 'ap' or 'reverse_jensen' preset"
        with pytest.raises(ValueError, match=match):
            ClassCorrespondence(concentric_disks())

    def test_n_samples(self):
        match = "'n_samples' must be a positive integer"
        with pytest.raises(ValueError, match=match):
            ClassCorrespondence(bmo_domain(0.5), n_samples=0)

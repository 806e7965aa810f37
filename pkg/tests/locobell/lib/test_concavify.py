
import pytest
import numpy as np

from numpy.testing import assert_allclose, assert_array_equal

from locobell.lib.concavify import (
    LATTICE,
    brute_force_majorant, build_mesh, local_concavity_violation, minimal_concave_majorant, upper_concave_hull,
)
from locobell.lib.exceptions import EmptyMesh, NotConverged
from locobell.lib.presets import bmo_domain, boundary_data


class TestUpperConcaveHull:

    def test_hull(self):

        reference = {
            'raised': [0.0, 1.0, 2.0, 3.0],
            'concave': [0.0, 2.0, 0.0],
        }

        assert_allclose(upper_concave_hull([0, 1, 2, 3], [0, 0, 0, 3]), reference['raised'])
        assert_allclose(upper_concave_hull([0, 1, 2], [0, 2, 0]), reference['concave'])

    def test_uneven_positions(self):
        assert_allclose(upper_concave_hull([0.0, 0.25, 1.0], [0.0, 0.0, 4.0]), [0.0, 1.0, 4.0])


class TestMesh:

    @staticmethod
    @pytest.fixture(scope='class')
    def mesh():
        return build_mesh(bmo_domain(0.5), window=(-1.5, 1.5), resolution=0.25)

    def test_nodes_in_domain(self, mesh):
        domain = bmo_domain(0.5)
        assert domain.contains(mesh.nodes).all()

    def test_box(self, mesh):
        assert_allclose(mesh.box, [[-1.5, 1.5], [0.0, 2.25]], atol=1e-6)

    def test_runs(self, mesh):

        assert len(mesh.runs) == len(mesh.positions)
        for run, positions in zip(mesh.runs, mesh.positions):
            assert len(run) >= 3
            assert np.all(np.diff(positions) > 0)

    def test_data_nodes(self, mesh):

        data = mesh.boundary_outer
        assert len(data) > 0
        assert_allclose(mesh.nodes[data, 1], mesh.nodes[data, 0] ** 2, atol=1e-9)

    def test_visibility(self, mesh):

        visibility = mesh.visibility
        assert (visibility != visibility.T).nnz == 0

        run = mesh.runs[0]
        assert set(run[1:]) <= set(mesh.adjacency(run[0]))

    def test_dataframes(self, mesh):

        nodes, edges = mesh.to_dataframes()

        assert list(nodes.columns) == ["node", "x1", "x2", "kind", "param"]
        assert list(edges.columns) == ["run", "source", "target"]
        assert len(nodes) == mesh.n_nodes
        assert len(edges) == sum(len(run) - 1 for run in mesh.runs)

    def test_lattice_count_scales(self):

        domain = bmo_domain(1.0)
        coarse = build_mesh(domain, window=(-2, 2), resolution=0.2, inner_chords=False)
        fine = build_mesh(domain, window=(-2, 2), resolution=0.1, inner_chords=False)

        assert 2.8 <= fine.n_lattice / coarse.n_lattice <= 5.2


class TestMeshExceptions:

    def test_resolution(self):
        match = "'resolution' must be greater than 0"
        with pytest.raises(ValueError, match=match):
            build_mesh(bmo_domain(0.5), window=(-1, 1), resolution=0.0)

    def test_empty(self):
        with pytest.raises(EmptyMesh):
            build_mesh(bmo_domain(0.5), window=((10.0, 11.0), (0.0, 1.0)), resolution=0.1)

    def test_window(self):
        match = "'window' must be an increasing pair of parameters"
        with pytest.raises(ValueError, match=match):
            build_mesh(bmo_domain(0.5), window=(1, -1), resolution=0.1)


class TestAffineData:

    @pytest.mark.parametrize('name, column', [("affine", 1), ("linear", 0)])
    def test_field_is_the_data(self, name, column):

        # affine data is its own minimal locally concave majorant
        domain = bmo_domain(0.5)
        curve = boundary_data(domain, name)
        mesh = build_mesh(domain, window=(-1.5, 1.5), resolution=0.25)

        field = minimal_concave_majorant(mesh, curve)

        assert field.converged
        assert not field.pinned.any()
        assert_allclose(field.values, mesh.nodes[:, column], atol=1e-8)
        assert_allclose(field.interpolate([[0.2, 0.1]]), [[0.2, 0.1][column]], atol=1e-8)


class TestMajorant:

    @staticmethod
    @pytest.fixture(scope='class')
    def domain():
        return bmo_domain(0.5)

    @staticmethod
    @pytest.fixture(scope='class')
    def curve(domain):
        return boundary_data(domain, "exp")

    @staticmethod
    @pytest.fixture(scope='class')
    def mesh(domain):
        return build_mesh(domain, window=((-1.0, 1.0), (0.0, 2.0)), resolution=0.2)

    @staticmethod
    @pytest.fixture(scope='class')
    def field(mesh, curve):
        return minimal_concave_majorant(mesh, curve, max_iters=100000, tolerance=1e-12)

    def test_converged(self, field):

        assert field.converged
        assert field.iterations == len(field.history)
        assert field.history[-1] <= 1e-12

    def test_brute_force(self, mesh, curve, field):

        reference = brute_force_majorant(mesh, curve, max_iters=100000, tolerance=1e-12)

        # both sweeps stop short of the common fixed point, so they agree within 1e-6
        assert reference.converged
        assert_allclose(field.values, reference.values, atol=1e-6)

    def test_jacobi(self, mesh, curve, field):

        jacobi = minimal_concave_majorant(mesh, curve, max_iters=100000, tolerance=1e-12, mode="jacobi")

        assert jacobi.converged
        assert_allclose(field.values, jacobi.values, atol=1e-6)

    def test_dominates_data(self, mesh, curve, field):

        assert field.data_residual(curve) == pytest.approx(0.0, abs=1e-12)
        assert np.all(field.values >= 0.0)

    def test_locally_concave(self, field):
        assert local_concavity_violation(field) <= 1e-6

    def test_dataframes(self, field):

        df = field.to_dataframe()
        assert list(df.columns) == ["x1", "x2", "value", "pinned_at_ceiling", "kind"]
        assert len(df) == field.mesh.n_nodes

        convergence = field.convergence_dataframe()
        assert list(convergence.columns) == ["iteration", "max_change"]
        assert_array_equal(convergence["iteration"], np.arange(1, field.iterations + 1))

    def test_not_converged(self, mesh, curve):

        with pytest.raises(NotConverged) as error:
            minimal_concave_majorant(mesh, curve, max_iters=1, strict=True)

        assert error.value.field is not None
        assert not error.value.field.converged

    def test_not_converged_warns(self, mesh, curve):
        field = minimal_concave_majorant(mesh, curve, max_iters=1)
        assert not field.converged


class TestMajorantExceptions:

    @staticmethod
    @pytest.fixture(scope='class')
    def mesh():
        return build_mesh(bmo_domain(0.5), window=(-1, 1), resolution=0.25)

    def test_mode(self, mesh):
        curve = boundary_data(bmo_domain(0.5), "exp")
        match = "'mode' must be either 'gauss-seidel' or 'jacobi'"
        with pytest.raises(ValueError, match=match):
            minimal_concave_majorant(mesh, curve, mode="sor")

    def test_max_iters(self, mesh):
        curve = boundary_data(bmo_domain(0.5), "exp")
        match = "'max_iters' must be a positive integer"
        with pytest.raises(ValueError, match=match):
            minimal_concave_majorant(mesh, curve, max_iters=0)


class TestRefinement:

    def test_finer_mesh_raises_field(self):

        domain = bmo_domain(0.5)
        curve = boundary_data(domain, "exp")

        fields = {
            resolution: minimal_concave_majorant(
                build_mesh(domain, window=(-1, 1), resolution=resolution),
                curve, max_iters=100000, tolerance=1e-12,
            )
            for resolution in (0.2, 0.1)
        }

        def lattice_values(field):
            mesh = field.mesh
            lattice = np.flatnonzero(mesh.kinds == LATTICE)
            keys = [tuple(np.round(mesh.nodes[i], 9)) for i in lattice]
            return dict(zip(keys, field.values[lattice]))

        coarse = lattice_values(fields[0.2])
        fine = lattice_values(fields[0.1])

        common = set(coarse) & set(fine)
        assert len(common) > 0
        for key in common:
            assert fine[key] >= coarse[key] - 1e-6

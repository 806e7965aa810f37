# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Minimal locally concave majorant --- :mod:`locobell.lib.concavify`
====================================================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module computes, on a mesh of the annular domain :math:`\\Omega`, the
smallest function that is concave along every segment inside :math:`\\Omega`
and dominates the boundary data on :math:`\\partial\\Omega_0`.

The mesh is built by :func:`build_mesh` from three kinds of nodes:

  - the points of a square lattice of spacing *resolution* that lie in
    :math:`\\Omega \\cap` window
  - points of :math:`\\partial\\Omega_0`, which carry boundary data
  - points of tangency on :math:`\\partial\\Omega_1`

The nodes are organised in *runs*: collinear chains of nodes whose
consecutive segments lie in :math:`\\Omega`. There are three families of runs:

  - lattice lines in 16 primitive directions, extended to
    :math:`\\partial\\Omega_0` when the boundary is crossed within one step
  - for every lattice node, the two tangent lines to :math:`\\Omega_1` through
    it, cut by :math:`\\partial\\Omega_0`
  - the tangent lines of :math:`\\partial\\Omega_1` at sampled points, cut by
    :math:`\\partial\\Omega_0`

Two nodes are visible from each other when they belong to a common run.
:func:`minimal_concave_majorant` then starts from the boundary data on
:math:`\\partial\\Omega_0` and from a lower bound of the data everywhere else,
and raises every run to its upper concave hull until nothing changes. The
fixed point is the smallest field that is concave along every run. Because
the runs are segments inside :math:`\\Omega`, the fixed point is bounded by the
continuous majorant, and refining the lattice adds runs and can only raise
the field.

Input
-----

Required:
  - *domain* : :class:`locobell.lib.geometry.Domain`
  - *window* : either an interval of outer boundary parameters, whose image
    bounds the window, or a box ``((x1_min, x1_max), (x2_min, x2_max))``
  - *curve* : :class:`locobell.lib.lace.LiftedCurve` with the boundary data

Options:
  - *resolution* : lattice spacing
  - *log_window* : the box is given in logarithmic coordinates
  - *mode* : ``'gauss-seidel'`` (in place) or ``'jacobi'`` (deterministic
    data-parallel sweeps)

Output
------

  - :class:`ScalarField` with one value per node, the nodes pinned at the
    ceiling that stands in for :math:`+\\infty`, and the sweep history

Example usage
-------------

::

  from locobell.lib.presets import bmo_domain, boundary_data
  from locobell.lib.concavify import build_mesh, minimal_concave_majorant

  domain = bmo_domain(epsilon=0.5)
  curve = boundary_data(domain, "exp")

  mesh = build_mesh(domain, window=(-2, 2), resolution=0.1)
  field = minimal_concave_majorant(mesh, curve)

The field can be evaluated anywhere in the window by linear interpolation::

  field.interpolate([[0.0, 0.25]])

and exported as a table::

  field.to_dataframe()

The functions and classes
-------------------------

.. autofunction:: build_mesh

.. autoclass:: Mesh
    :members:

.. autofunction:: minimal_concave_majorant

.. autoclass:: ScalarField
    :members:

.. autofunction:: local_concavity_violation

.. autofunction:: brute_force_majorant

"""
import logging
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np
import pandas as pd
import scipy.interpolate
import scipy.sparse

from locobell.lib.exceptions import EmptyMesh, NoTangent, NotConverged
from locobell.lib.geometry import ON, OUTSIDE, boundary_hits, cross, segment_in_domain, tangent_chord, tangent_points

logger = logging.getLogger(__name__)

__all__ = [
    "DIRECTIONS",
    "Mesh",
    "ScalarField",
    "build_mesh",
    "upper_concave_hull",
    "initial_field",
    "minimal_concave_majorant",
    "brute_force_majorant",
    "local_concavity_violation",
]

# Primitive lattice directions with coordinates of absolute value at most 3
DIRECTIONS = (
    (1, 0), (0, 1), (1, 1), (1, -1),
    (1, 2), (2, 1), (1, -2), (2, -1),
    (1, 3), (3, 1), (1, -3), (3, -1),
    (2, 3), (3, 2), (2, -3), (3, -2),
)

LATTICE, BOUNDARY, INNER = "lattice", "boundary", "inner"

# Number of samples used to bound the boundary data over the window
FLOOR_SAMPLES = 20001


@dataclass(eq=False)
class Mesh:
    """Nodes of the annular domain organised in collinear runs.

    Attributes
    ----------
    nodes : numpy.ndarray
        Node positions, shape (n, 2).
    params : numpy.ndarray
        Outer boundary parameter of each node on the outer boundary, ``nan``
        elsewhere. These nodes carry boundary data.
    kinds : numpy.ndarray
        ``'lattice'``, ``'boundary'`` or ``'inner'`` for each node.
    runs : list of numpy.ndarray
        Node indices of each run, ordered along the run.
    positions : list of numpy.ndarray
        Coordinate of each node of a run along its line.
    resolution : float
        Lattice spacing.
    box : numpy.ndarray
        The window as ``((x1_min, x1_max), (x2_min, x2_max))``.
    outer_z_range : tuple of float or None
        Search coordinates of the outer boundary spanning the window.

    """

    nodes: np.ndarray
    params: np.ndarray
    kinds: np.ndarray
    runs: list
    positions: list
    resolution: float
    box: np.ndarray
    outer_z_range: tuple = None
    lattice_shape: tuple = dataclass_field(default=(0, 0))

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_lattice(self):
        return int(np.sum(self.kinds == LATTICE))

    @property
    def boundary_outer(self):
        """Indices of the nodes on the outer boundary."""
        return np.flatnonzero(np.isfinite(self.params))

    @cached_property
    def visibility(self):
        """Symmetric sparse matrix of the node pairs sharing a run."""
        rows, cols = [], []
        for run in self.runs:
            first, second = np.triu_indices(len(run), k=1)
            rows.append(run[first])
            cols.append(run[second])

        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=int)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=int)
        data = np.ones(2 * len(rows))
        matrix = scipy.sparse.coo_matrix(
            (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(self.n_nodes, self.n_nodes),
        ).tocsr()
        matrix.data[:] = 1.0
        return matrix

    def adjacency(self, index):
        """Indices of the nodes visible from node `index`."""
        visibility = self.visibility
        return visibility.indices[visibility.indptr[index]:visibility.indptr[index + 1]]

    def to_dataframes(self):
        """Node and edge tables; the edges join consecutive nodes of each run."""
        nodes = pd.DataFrame({
            "node": np.arange(self.n_nodes),
            "x1": self.nodes[:, 0],
            "x2": self.nodes[:, 1],
            "kind": self.kinds,
            "param": self.params,
        })

        edges = [
            [index, run[k], run[k + 1]]
            for index, run in enumerate(self.runs)
            for k in range(len(run) - 1)
        ]
        edges = pd.DataFrame(edges, columns=["run", "source", "target"])
        return nodes, edges


class _MeshBuilder:
    """Collects nodes and runs while a mesh is built."""

    def __init__(self, domain, samples):
        self.domain = domain
        self.samples = samples
        self.nodes = []
        self.params = []
        self.kinds = []
        self.runs = []
        self.positions = []

    def add(self, point, param=np.nan, kind=BOUNDARY):
        self.nodes.append(np.asarray(point, dtype=float))
        self.params.append(float(param))
        self.kinds.append(kind)
        return len(self.nodes) - 1

    def add_run(self, indices, points):
        if len(indices) < 3:
            return
        points = np.asarray(points, dtype=float)
        direction = points[-1] - points[0]
        direction /= np.linalg.norm(direction)
        self.runs.append(np.asarray(indices, dtype=int))
        self.positions.append((points - points[0]) @ direction)

    def visible(self, p, q):
        return segment_in_domain(self.domain, p, q, samples=self.samples)

    def crossing(self, point, step, forward):
        """Parameter where the outer boundary is crossed within one `step` from `point`, if any."""
        distances, params = boundary_hits(self.domain.outer, point, step)
        if forward:
            hits = (distances > 0) & (distances <= 1 + 1e-9)
            return params[hits][0] if hits.any() else None
        hits = (distances < 0) & (distances >= -1 - 1e-9)
        return params[hits][-1] if hits.any() else None

    def chord_run(self, middle, params):
        """Run of three nodes along a chord of the outer boundary through node `middle`."""
        ends = np.asarray(self.domain.outer.eval(np.asarray(params)), dtype=float)
        if not self.visible(ends[0], ends[1]):
            return
        point = self.nodes[middle]
        first = self.add(ends[0], params[0])
        last = self.add(ends[1], params[1])
        self.add_run([first, middle, last], [ends[0], point, ends[1]])

    def build(self, **kwargs):
        return Mesh(
            nodes=np.asarray(self.nodes, dtype=float).reshape(-1, 2),
            params=np.asarray(self.params, dtype=float),
            kinds=np.asarray(self.kinds, dtype=object),
            runs=self.runs,
            positions=self.positions,
            **kwargs
        )


def _window_box(domain, window, log_window):
    """The window as a box, and the span of outer boundary search coordinates inside it."""
    window = np.asarray(window, dtype=float)
    outer = domain.outer

    if window.shape == (2,):
        lo, hi = window
        if not lo < hi:
            raise ValueError("'window' must be an increasing pair of parameters")
        z_range = (float(outer.to_z(lo)), float(outer.to_z(hi)))
        points = np.asarray(outer.eval(outer.to_param(np.linspace(*z_range, 4097))), dtype=float)
        box = np.stack([points.min(axis=0), points.max(axis=0)], axis=-1)
        return box, z_range

    if window.shape != (2, 2):
        raise ValueError("'window' must be a parameter interval or a box ((x1_min, x1_max), (x2_min, x2_max))")

    box = np.exp(window) if log_window else window
    if not np.all(box[:, 0] < box[:, 1]):
        raise ValueError("'window' must have increasing bounds")

    z = list(outer.search_grids())[-1]
    with np.errstate(all="ignore"):
        points = np.asarray(outer.eval(outer.to_param(z)), dtype=float)
    inside = np.flatnonzero(_in_box(points, box))
    if len(inside) == 0:
        return box, None
    first, last = max(inside[0] - 1, 0), min(inside[-1] + 1, len(z) - 1)
    return box, (float(z[first]), float(z[last]))


def _in_box(points, box, slack=1e-9):
    points = np.asarray(points, dtype=float)
    return np.all((points >= box[:, 0] - slack) & (points <= box[:, 1] + slack), axis=-1)


def _curve_samples(curve, z_range, spacing, box, limit=20000):
    """Parameters of curve points inside `box`, nested under halving of `spacing`."""
    z_lo, z_hi = z_range
    z = np.linspace(z_lo, z_hi, 4097)
    with np.errstate(all="ignore"):
        speed = np.linalg.norm(curve.d1(curve.to_param(z)), axis=-1) * curve.param_speed(z)
    top = np.nanmax(speed[np.isfinite(speed)]) if np.any(np.isfinite(speed)) else 1.0

    dz = max(spacing / top, (z_hi - z_lo) / limit)
    z = z_lo + dz * np.arange(int(np.floor((z_hi - z_lo) / dz)) + 1)
    t = curve.to_param(z)
    with np.errstate(all="ignore"):
        inside = _in_box(curve.eval(t), box)
    return t[inside]


def _inner_z_range(domain, box):
    inner = domain.inner
    z = list(inner.search_grids())[-1]
    with np.errstate(all="ignore"):
        inside = np.flatnonzero(_in_box(inner.eval(inner.to_param(z)), box))
    if len(inside) == 0:
        return None
    return float(z[inside[0]]), float(z[inside[-1]])


def build_mesh(domain, window, resolution, samples=64, log_window=False, inner_chords=True):
    """Build a mesh of the part of the domain inside `window`.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    window : tuple
        An interval ``(t_min, t_max)`` of outer boundary parameters, in which
        case the window is the bounding box of that piece of the outer
        boundary, or a box ``((x1_min, x1_max), (x2_min, x2_max))``.
    resolution : float
        Lattice spacing, greater than 0. Halving it gives a lattice that
        contains the coarser one.
    samples : int, optional
        Number of samples used to check that a segment lies in the domain.
    log_window : bool, optional
        The box is given in logarithmic coordinates.
    inner_chords : bool, optional
        Add the tangent lines of the inner boundary at sampled points.

    Returns
    -------
    mesh : Mesh

    Raises
    ------
    EmptyMesh
        If the window does not meet the domain.

    """
    if not resolution > 0:
        raise ValueError("'resolution' must be greater than 0")

    outer = domain.outer
    box, z_range = _window_box(domain, window, log_window)

    counts = np.floor((box[:, 1] - box[:, 0]) / resolution + 1e-9).astype(int) + 1
    i, j = np.meshgrid(np.arange(counts[0]), np.arange(counts[1]), indexing="ij")
    lattice = np.stack([box[0, 0] + i * resolution, box[1, 0] + j * resolution], axis=-1)
    keep = domain.contains(lattice)

    boundary_t = _curve_samples(outer, z_range, resolution / 2, box) if z_range is not None else np.zeros(0)
    if not keep.any() and len(boundary_t) == 0:
        raise EmptyMesh(f"the window {box.tolist()} does not meet the domain")

    builder = _MeshBuilder(domain, samples)

    index = np.full(counts, -1, dtype=int)
    for a, b in zip(*np.nonzero(keep)):
        point = lattice[a, b]
        param = outer.nearest_param(point) if domain.outer_region(point) == ON else np.nan
        index[a, b] = builder.add(point, param, kind=LATTICE)

    logger.info(f"built a lattice of {int(keep.sum())} nodes at resolution {resolution}")

    for p, q in DIRECTIONS:
        _lattice_runs(builder, lattice, index, (p, q), resolution)

    for a, b in zip(*np.nonzero(keep)):
        _tangent_runs(builder, index[a, b])

    if inner_chords:
        z_inner = _inner_z_range(domain, box)
        if z_inner is not None:
            for s in _curve_samples(domain.inner, z_inner, resolution, box):
                try:
                    params, _ = tangent_chord(domain, s)
                except NoTangent:
                    continue
                touch = builder.add(domain.inner.eval(s), kind=INNER)
                builder.chord_run(touch, params)

    for t in boundary_t:
        builder.add(outer.eval(t), t)

    mesh = builder.build(resolution=float(resolution), box=box, outer_z_range=z_range, lattice_shape=tuple(counts))
    mesh = _prune(mesh)
    logger.info(f"mesh with {mesh.n_nodes} nodes and {len(mesh.runs)} runs")
    return mesh


def _lattice_runs(builder, lattice, index, direction, resolution):
    """Chains of consecutive lattice nodes along `direction`, extended to the outer boundary."""
    p, q = direction
    shape = index.shape
    step = resolution * np.array([p, q], dtype=float)
    outer_region = builder.domain.outer_region

    def neighbour(a, b, sign):
        a2, b2 = a + sign * p, b + sign * q
        if 0 <= a2 < shape[0] and 0 <= b2 < shape[1]:
            return a2, b2
        return None

    def linked(a, b, sign):
        other = neighbour(a, b, sign)
        if other is None or index[other] < 0:
            return None
        if not builder.visible(lattice[a, b], lattice[other]):
            return None
        return other

    def extension(a, b, sign):
        other = neighbour(a, b, sign)
        if other is None or outer_region(lattice[other]) != OUTSIDE:
            return None
        param = builder.crossing(lattice[a, b], sign * step, forward=sign > 0)
        if param is None:
            return None
        point = np.asarray(builder.domain.outer.eval(param), dtype=float)
        if not builder.visible(lattice[a, b], point):
            return None
        return param, point

    for a, b in zip(*np.nonzero(index >= 0)):
        if linked(a, b, -1) is not None:
            continue

        chain = [(a, b)]
        while True:
            following = linked(*chain[-1], 1)
            if following is None:
                break
            chain.append(following)

        indices = [index[node] for node in chain]
        points = [lattice[node] for node in chain]

        start = extension(a, b, -1)
        if start is not None:
            indices.insert(0, builder.add(start[1], start[0]))
            points.insert(0, start[1])

        end = extension(*chain[-1], 1)
        if end is not None:
            indices.append(builder.add(end[1], end[0]))
            points.append(end[1])

        builder.add_run(indices, points)


def _tangent_runs(builder, node):
    """Runs along the tangent lines to the inner set through a lattice node."""
    domain = builder.domain
    point = builder.nodes[node]

    if np.isfinite(builder.params[node]):
        return

    if domain.inner_region(point) == ON:
        try:
            params, _ = tangent_chord(domain, domain.inner.nearest_param(point))
        except NoTangent:
            return
        builder.chord_run(node, params)
        return

    try:
        touches = tangent_points(domain, point)
    except NoTangent:
        return

    for s in touches:
        direction = np.asarray(domain.inner.eval(s), dtype=float) - point
        distances, params = boundary_hits(domain.outer, point, direction)
        behind, ahead = distances < 0, distances > 1
        if behind.any() and ahead.any():
            builder.chord_run(node, (params[behind][-1], params[ahead][0]))


def _prune(mesh):
    """Drop lattice nodes that belong to no run."""
    used = np.zeros(mesh.n_nodes, dtype=bool)
    for run in mesh.runs:
        used[run] = True
    keep = used | (mesh.kinds != LATTICE) | np.isfinite(mesh.params)

    if keep.all():
        return mesh

    renumber = np.cumsum(keep) - 1
    return Mesh(
        nodes=mesh.nodes[keep],
        params=mesh.params[keep],
        kinds=mesh.kinds[keep],
        runs=[renumber[run] for run in mesh.runs],
        positions=mesh.positions,
        resolution=mesh.resolution,
        box=mesh.box,
        outer_z_range=mesh.outer_z_range,
        lattice_shape=mesh.lattice_shape,
    )


def upper_concave_hull(positions, values):
    """Values at `positions` of the least concave function lying above the points.

    `positions` must be increasing. The hull is found with a monotone chain
    scan.
    """
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)

    hull = []
    for k in range(len(positions)):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            turn = (
                (positions[j] - positions[i]) * (values[k] - values[i])
                - (positions[k] - positions[i]) * (values[j] - values[i])
            )
            if turn >= 0:
                hull.pop()
            else:
                break
        hull.append(k)

    return np.interp(positions, positions[hull], values[hull])


@dataclass(eq=False)
class ScalarField:
    """One value per mesh node, with the sweep diagnostics.

    Values equal to the ceiling stand in for plus infinity; those nodes are
    flagged in `pinned`.
    """

    mesh: Mesh
    values: np.ndarray
    pinned: np.ndarray
    converged: bool = True
    iterations: int = 0
    history: list = dataclass_field(default_factory=list)
    ceiling: float = 1e12

    @cached_property
    def _interpolators(self):
        nodes, unique = np.unique(np.round(self.mesh.nodes, 12), axis=0, return_index=True)
        values = self.values[unique]
        return (
            scipy.interpolate.LinearNDInterpolator(nodes, values),
            scipy.interpolate.NearestNDInterpolator(nodes, values),
        )

    def interpolate(self, points):
        """Linear interpolation of the field, nearest node outside the convex hull of the nodes."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        linear, nearest = self._interpolators
        values = linear(points)
        missing = np.isnan(values)
        if missing.any():
            values[missing] = nearest(points[missing])
        return values

    def data_residual(self, curve):
        """Largest excess of the field over the boundary data on the outer boundary nodes."""
        data = self.mesh.boundary_outer
        if len(data) == 0:
            return 0.0
        return float(np.max(self.values[data] - curve.f_tilde(self.mesh.params[data])))

    def to_dataframe(self):
        return pd.DataFrame({
            "x1": self.mesh.nodes[:, 0],
            "x2": self.mesh.nodes[:, 1],
            "value": self.values,
            "pinned_at_ceiling": self.pinned,
            "kind": self.mesh.kinds,
        })

    def convergence_dataframe(self):
        return pd.DataFrame({
            "iteration": np.arange(1, len(self.history) + 1),
            "max_change": self.history,
        })


def initial_field(mesh, curve, ceiling=1e12):
    """Boundary data on the outer boundary nodes and a lower bound of the data elsewhere.

    The lower bound is the infimum of the boundary data when the curve knows
    it. Otherwise it is the smallest value of the data over a fixed sampling
    of the outer boundary inside the window, and over the data nodes.
    """
    data = mesh.boundary_outer
    with np.errstate(all="ignore"):
        data_values = np.asarray(curve.f_tilde(mesh.params[data]), dtype=float)

    if curve.lower_bound is not None:
        floor = curve.lower_bound
    else:
        candidates = [data_values[np.isfinite(data_values)]]
        if mesh.outer_z_range is not None:
            t = curve.base.to_param(np.linspace(*mesh.outer_z_range, FLOOR_SAMPLES))
            with np.errstate(all="ignore"):
                sampled = np.asarray(curve.f_tilde(t), dtype=float)
            candidates.append(sampled[np.isfinite(sampled)])
        candidates = np.concatenate(candidates)
        if len(candidates) == 0:
            raise ValueError("the boundary data has no finite value inside the window")
        floor = float(np.min(candidates))

    values = np.full(mesh.n_nodes, float(floor))
    values[data] = np.where(np.isnan(data_values), ceiling, data_values)
    return np.minimum(values, ceiling)


def _run_groups(mesh):
    """Three-node runs as arrays, and the longer runs."""
    triples = [(run, pos) for run, pos in zip(mesh.runs, mesh.positions) if len(run) == 3]
    longer = [(run, pos) for run, pos in zip(mesh.runs, mesh.positions) if len(run) > 3]

    if triples:
        runs = np.array([run for run, _ in triples])
        positions = np.array([pos for _, pos in triples])
        first = (positions[:, 2] - positions[:, 1]) / (positions[:, 2] - positions[:, 0])
        triples = (runs[:, 0], runs[:, 1], runs[:, 2], first, 1 - first)
    else:
        triples = None
    return triples, longer


def minimal_concave_majorant(mesh, curve, max_iters=10000, tolerance=1e-9, mode="gauss-seidel",
                             ceiling=1e12, strict=False):
    """Compute the smallest field that is concave along every run and dominates the data.

    Parameters
    ----------
    mesh : Mesh
        The mesh of the domain.
    curve : LiftedCurve
        The boundary data.
    max_iters : int, optional
        Largest number of sweeps.
    tolerance : float, optional
        The sweeps stop when no value changes by more than this.
    mode : {'gauss-seidel', 'jacobi'}, optional
        Update every run in place, or compute every update from the values of
        the previous sweep.
    ceiling : float, optional
        Stand-in for plus infinity; values are capped at it.
    strict : bool, optional
        Raise :class:`NotConverged` instead of returning an unconverged field.

    Returns
    -------
    field : ScalarField
        The sweep values never decrease, so every intermediate field lies
        below the fixed point.

    Raises
    ------
    NotConverged
        If `strict` is set and the sweeps did not converge. The last field is
        attached to the exception.

    """
    if mode not in ("gauss-seidel", "jacobi"):
        raise ValueError("'mode' must be either 'gauss-seidel' or 'jacobi'")

    if max_iters < 1:
        raise ValueError("'max_iters' must be a positive integer")

    values = initial_field(mesh, curve, ceiling)
    triples, longer = _run_groups(mesh)

    history, converged = [], False
    for iteration in range(1, max_iters + 1):

        previous = values.copy()
        source = previous if mode == "jacobi" else values

        if triples is not None:
            first, middle, last, w_first, w_last = triples
            np.maximum.at(values, middle, w_first * source[first] + w_last * source[last])

        for run, positions in longer:
            hull = upper_concave_hull(positions, source[run])
            if mode == "jacobi":
                np.maximum.at(values, run, hull)
            else:
                values[run] = np.maximum(values[run], hull)

        np.minimum(values, ceiling, out=values)
        change = float(np.max(values - previous)) if len(values) else 0.0
        history.append(change)

        if iteration % 100 == 0:
            logger.debug(f"sweep {iteration}: largest change {change}")

        if change <= tolerance:
            converged = True
            break

    field = ScalarField(
        mesh=mesh,
        values=values,
        pinned=values >= ceiling,
        converged=converged,
        iterations=len(history),
        history=history,
        ceiling=ceiling,
    )

    if not converged:
        message = f"the majorant did not converge in {max_iters} sweeps (last change {history[-1]})"
        if strict:
            raise NotConverged(message, field=field)
        logger.warning(message)

    return field


def _visible_triples(mesh):
    """Every collinear triple (y, x, z) of mutually visible nodes with x between y and z."""
    visibility = mesh.visibility
    nodes = mesh.nodes
    middle, left, right, w_left, w_right = [], [], [], [], []

    for x in range(mesh.n_nodes):
        neighbours = mesh.adjacency(x)
        if len(neighbours) < 2:
            continue

        first, second = np.triu_indices(len(neighbours), k=1)
        y, z = neighbours[first], neighbours[second]
        visible = np.asarray(visibility[y, z]).ravel() > 0

        dy, dz = nodes[y] - nodes[x], nodes[z] - nodes[x]
        ly, lz = np.linalg.norm(dy, axis=-1), np.linalg.norm(dz, axis=-1)
        between = visible & (np.abs(cross(dy, dz)) <= 1e-9 * ly * lz) & (np.sum(dy * dz, axis=-1) < 0)

        middle.append(np.full(between.sum(), x))
        left.append(y[between])
        right.append(z[between])
        w_left.append(lz[between] / (ly[between] + lz[between]))
        w_right.append(ly[between] / (ly[between] + lz[between]))

    if not middle:
        return tuple(np.zeros(0, dtype=int) for _ in range(3)) + (np.zeros(0), np.zeros(0))
    return tuple(np.concatenate(column) for column in (middle, left, right, w_left, w_right))


def brute_force_majorant(mesh, curve, max_iters=10000, tolerance=1e-9, ceiling=1e12):
    """Reference majorant from an exhaustive enumeration of visible triples.

    Every node is raised to the largest interpolation over all pairs of
    mutually visible nodes it lies between, with Jacobi sweeps. The
    constraint set is that of :func:`minimal_concave_majorant`, so both
    approach the same fixed point and agree up to their stopping tolerances.
    The enumeration is cubic in the run length and is
    meant for coarse meshes.
    """
    values = initial_field(mesh, curve, ceiling)
    middle, left, right, w_left, w_right = _visible_triples(mesh)

    history, converged = [], False
    for _ in range(max_iters):
        previous = values.copy()
        np.maximum.at(values, middle, w_left * previous[left] + w_right * previous[right])
        np.minimum(values, ceiling, out=values)
        change = float(np.max(values - previous)) if len(values) else 0.0
        history.append(change)
        if change <= tolerance:
            converged = True
            break

    return ScalarField(
        mesh=mesh, values=values, pinned=values >= ceiling, converged=converged,
        iterations=len(history), history=history, ceiling=ceiling,
    )


def local_concavity_violation(field):
    """Largest amount by which an interpolation along a run exceeds the field.

    This is the maximum over collinear visible triples (y, x, z) of
    ``w G(y) + (1 - w) G(z) - G(x)``, found run by run through the upper
    concave hull. A value within the sweep tolerance certifies discrete local
    concavity.
    """
    values = np.asarray(field.values, dtype=float)
    violation = 0.0
    for run, positions in zip(field.mesh.runs, field.mesh.positions):
        local = values[run]
        if not np.all(np.isfinite(local)):
            continue
        violation = max(violation, float(np.max(upper_concave_hull(positions, local) - local)))
    return violation

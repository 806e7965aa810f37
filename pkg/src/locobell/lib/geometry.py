# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Geometry --- :mod:`locobell.lib.geometry`
===========================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module provides the planar geometry of an annular domain
:math:`\\Omega = \\mathrm{cl}(\\Omega_0 \\setminus \\Omega_1)`, where
:math:`\\Omega_0` and :math:`\\Omega_1 \\subset \\Omega_0` are two nested,
strictly convex, open sets in the plane.

Each boundary is a :class:`BoundaryCurve`: a parametrised convex curve that
knows its first three derivatives and a *level* function that is negative
inside the convex set it bounds, zero on the curve and positive outside.
A :class:`Domain` bundles the outer boundary :math:`\\partial\\Omega_0` and
the inner boundary :math:`\\partial\\Omega_1` and offers membership tests.

From a point :math:`g(u)` of the outer boundary one can draw two tangent
segments to :math:`\\Omega_1`. Looking along :math:`g'(u)`, with the domain on
the left of the oriented curve, the *left* tangent lies between the *right*
tangent and :math:`g'(u)`. The function :func:`tangent` returns either of them
as a :class:`Tangent`, carrying its length and its oriented angle with the
vector :math:`(1, 0)`.

The module also provides the admissibility diagnostics of a domain:

  - :func:`check_unboundedness` : both boundaries run off to infinity inside the
    searched parameter window
  - :func:`check_ray_condition` : every ray that fits in :math:`\\Omega_0` has a
    translate that fits in :math:`\\Omega_1`
  - :func:`check_divergence_condition` : the integrals of the reciprocal tangent
    lengths along :math:`\\partial\\Omega_1` diverge
  - :func:`check_derivatives` : the derivative callbacks of a curve agree with
    central finite differences

All of these are sampled certificates, not proofs. Each returns a
:class:`ConditionReport` holding a verdict and a :class:`pandas.DataFrame`
with the per-sample evidence.

Input
-----

Required:
  - *eval*, *d1*, *d2*, *d3* : vectorised callbacks returning points and
    derivative vectors of a curve, with shape (..., 2)
  - *level* : vectorised callback mapping points of shape (..., 2) to a signed
    level, negative inside the convex set

Options:
  - *param_range* : open parameter interval of the curve, possibly unbounded
  - *periodic* : whether the curve is closed and its parameter periodic


Example usage of :func:`tangent`
--------------------------------

Domains are usually built with :mod:`locobell.lib.presets`::

  from locobell.lib.presets import bmo_domain
  from locobell.lib.geometry import tangent

  domain = bmo_domain(epsilon=0.5)

The right tangent drawn from the point :math:`g(0) = (0, 0)` of the parabola
:math:`x_2 = x_1^2` touches the inner parabola at the parameter :math:`-0.5`::

  right = tangent(domain, u=0.0, side="right")
  right.touch_param  # -0.5
  right.length       # 0.7071...

Segment visibility is resolution limited: :func:`segment_in_domain` samples
*samples* interior points of the segment and checks each of them::

  segment_in_domain(domain, (-1, 1), (1, 1), samples=64)

The functions and classes
-------------------------

.. autoclass:: BoundaryCurve
    :members:

.. autoclass:: Domain
    :members:

.. autoclass:: Tangent

.. autoclass:: ConditionReport

.. autofunction:: tangent

.. autofunction:: segment_in_domain

.. autofunction:: check_ray_condition

.. autofunction:: check_divergence_condition

"""
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd
import scipy.integrate
import scipy.optimize
import scipy.special

from locobell.lib.exceptions import NoTangent, QuadratureFailure

logger = logging.getLogger(__name__)

__all__ = [
    "BoundaryCurve",
    "Domain",
    "Tangent",
    "ConditionReport",
    "tangent",
    "tangent_points",
    "boundary_hits",
    "ray_exit",
    "tangent_chord",
    "segment_in_domain",
    "check_unboundedness",
    "check_ray_condition",
    "check_divergence_condition",
    "classify_growth",
    "check_derivatives",
    "finite_difference_errors",
]

INSIDE, ON, OUTSIDE = -1, 0, 1
LEFT, RIGHT = "left", "right"

# Number of points of each root-search grid
SEARCH_POINTS = 4097


def cross(u, v):
    """z-component of the cross product of planar vectors of shape (..., 2)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """A strictly convex planar curve with derivatives up to third order.

    The callbacks must be vectorised: given an array of parameters of shape
    (n,) they return an array of shape (n, 2), and given a scalar they return
    an array of shape (2,).
    """

    eval: Callable
    d1: Callable
    d2: Callable
    d3: Callable
    level: Callable
    param_range: tuple = (-np.inf, np.inf)
    periodic: bool = False
    name: str = "curve"

    def __post_init__(self):

        lo, hi = self.param_range
        if not lo < hi:
            raise ValueError("'param_range' must be an increasing pair of numbers")

        if self.periodic and not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("'param_range' of a periodic curve must be finite")

    @property
    def _mapping(self):
        lo, hi = self.param_range
        if self.periodic or (np.isinf(lo) and np.isinf(hi)):
            return "identity"
        elif np.isinf(hi):
            return "lower"
        elif np.isinf(lo):
            return "upper"
        return "logistic"

    def to_param(self, z):
        """Map search coordinates onto the parameter interval."""
        lo, hi = self.param_range
        z = np.asarray(z, dtype=float)
        mapping = self._mapping
        if mapping == "identity":
            return z
        elif mapping == "lower":
            return lo + np.exp(z)
        elif mapping == "upper":
            return hi - np.exp(-z)
        return lo + (hi - lo) * scipy.special.expit(z)

    def to_z(self, t):
        """Map parameters onto search coordinates, the inverse of :meth:`to_param`."""
        lo, hi = self.param_range
        t = np.asarray(t, dtype=float)
        mapping = self._mapping
        if mapping == "identity":
            return t
        elif mapping == "lower":
            return np.log(t - lo)
        elif mapping == "upper":
            return -np.log(hi - t)
        return scipy.special.logit((t - lo) / (hi - lo))

    def param_speed(self, z):
        """Derivative of :meth:`to_param` with respect to the search coordinate."""
        lo, hi = self.param_range
        z = np.asarray(z, dtype=float)
        mapping = self._mapping
        if mapping == "identity":
            return np.ones_like(z)
        elif mapping == "lower":
            return np.exp(z)
        elif mapping == "upper":
            return np.exp(-z)
        s = scipy.special.expit(z)
        return (hi - lo) * s * (1 - s)

    def search_grids(self, center=0.0):
        """Yield increasingly wide grids of search coordinates around `center`."""
        if self.periodic:
            lo, hi = self.param_range
            yield np.linspace(lo, hi, SEARCH_POINTS)
            return

        widths = (4.0, 16.0, 64.0, 256.0) if self._mapping == "identity" else (4.0, 12.0, 30.0)
        for width in widths:
            yield center + np.linspace(-width, width, SEARCH_POINTS)

    def wrap(self, t):
        """Reduce parameters of a periodic curve into its parameter range."""
        if not self.periodic:
            return t
        lo, hi = self.param_range
        return lo + np.mod(np.asarray(t, dtype=float) - lo, hi - lo)

    @property
    def orientation(self):
        """+1 if the convex set lies on the left of the curve traversed with increasing parameter."""
        if self.periodic:
            t = 0.5 * sum(self.param_range)
        else:
            t = float(self.to_param(0.0))
        return 1 if cross(self.d1(t), self.d2(t)) > 0 else -1

    def unit_tangent(self, t):
        """Unit tangent vectors, oriented so that the convex set lies on the left."""
        d1 = np.asarray(self.d1(t), dtype=float)
        return self.orientation * d1 / np.linalg.norm(d1, axis=-1, keepdims=True)

    def guess_z(self, point, center=0.0):
        """Search coordinate of the sampled curve point closest to `point`."""
        point = np.asarray(point, dtype=float)
        best_z, best_distance = center, np.inf
        for z in self.search_grids(center):
            with np.errstate(all="ignore"):
                distance = np.linalg.norm(self.eval(self.to_param(z)) - point, axis=-1)
            distance = np.where(np.isfinite(distance), distance, np.inf)
            index = np.argmin(distance)
            if distance[index] < best_distance:
                best_z, best_distance = z[index], distance[index]
        return best_z

    def nearest_param(self, point):
        """Parameter of the curve point closest to `point`."""
        z0 = self.guess_z(point)
        step = 0.25

        def squared_distance(z):
            with np.errstate(all="ignore"):
                return float(np.sum((self.eval(self.to_param(z)) - point) ** 2))

        result = scipy.optimize.minimize_scalar(
            squared_distance,
            bounds=(z0 - step, z0 + step),
            method="bounded",
            options={"xatol": 1e-13}
        )
        return float(self.wrap(self.to_param(result.x)))

    def transformed(self, angle=0.0, shift=(0.0, 0.0)):
        """A copy of the curve moved by a rotation through `angle` followed by a translation."""
        rotation = _rotation(angle)
        shift = np.asarray(shift, dtype=float)

        def moved(callback, translate):
            def _moved(t):
                value = np.asarray(callback(t), dtype=float) @ rotation.T
                return value + shift if translate else value
            return _moved

        def level(points):
            points = (np.asarray(points, dtype=float) - shift) @ rotation
            return self.level(points)

        return BoundaryCurve(
            eval=moved(self.eval, True),
            d1=moved(self.d1, False),
            d2=moved(self.d2, False),
            d3=moved(self.d3, False),
            level=level,
            param_range=self.param_range,
            periodic=self.periodic,
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class Domain:
    """The annular domain cl(Omega_0 minus Omega_1).

    `outer` parametrises the boundary of Omega_0 and `inner` the boundary of
    Omega_1. A domain whose inner boundary touches the outer one is accepted
    with a warning and flagged with ``touching=True``.
    """

    outer: BoundaryCurve
    inner: BoundaryCurve
    name: str = "custom"
    params: dict = field(default_factory=dict)
    tol: float = 1e-10
    touching: bool = field(init=False, default=False)

    def __post_init__(self):

        t = self.inner.to_param(next(self.inner.search_grids())[::16])
        with np.errstate(all="ignore"):
            level = self.outer.level(self.inner.eval(t))
        level = level[np.isfinite(level)]

        if np.any(level > self.tol):
            raise ValueError("'inner' boundary must lie inside the closure of the outer set")

        if np.any(level >= -self.tol):
            object.__setattr__(self, "touching", True)
            logger.warning(
                f"the inner boundary of the '{self.name}' domain touches its outer boundary: "
                "the domain is degenerate near the contact"
            )

    def outer_region(self, points):
        """-1 inside Omega_0, 0 on its boundary and +1 outside."""
        return self._region(self.outer, points)

    def inner_region(self, points):
        """-1 inside Omega_1, 0 on its boundary and +1 outside."""
        return self._region(self.inner, points)

    def _region(self, curve, points):
        with np.errstate(all="ignore"):
            level = curve.level(np.asarray(points, dtype=float))
        level = np.where(np.isnan(level), np.inf, level)
        return np.where(np.abs(level) <= self.tol, ON, np.where(level < 0, INSIDE, OUTSIDE))

    def contains(self, points):
        """Whether points belong to the closed annular domain."""
        return (self.outer_region(points) <= ON) & (self.inner_region(points) >= ON)

    def transformed(self, angle=0.0, shift=(0.0, 0.0)):
        """A copy of the domain moved by a rigid motion."""
        return Domain(
            outer=self.outer.transformed(angle, shift),
            inner=self.inner.transformed(angle, shift),
            name=self.name,
            params=dict(self.params),
            tol=self.tol,
        )


@dataclass(frozen=True)
class Tangent:
    """A tangent segment from a point of the outer boundary to the inner set."""

    source_param: float
    touch_param: float
    length: float
    angle: float
    side: str
    source: tuple
    touch: tuple


@dataclass
class ConditionReport:
    """Verdict of a sampled diagnostic together with its evidence."""

    condition: str
    verdict: str
    table: pd.DataFrame
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict in ("pass", "diverges", "consistent with unbounded")


def _unique(roots, curve):
    roots = np.sort(curve.wrap(np.asarray(roots, dtype=float)))
    unique = []
    for root in roots:
        if not unique or abs(root - unique[-1]) > 1e-9 * max(1.0, abs(root)):
            unique.append(root)

    if curve.periodic and len(unique) > 1:
        lo, hi = curve.param_range
        if abs(unique[0] + (hi - lo) - unique[-1]) <= 1e-9 * max(1.0, abs(unique[-1])):
            unique.pop()

    return np.array(unique)


def _roots(curve, func, center=0.0, max_roots=2):
    """Roots of func(t) over the search grids of `curve`, refined with Brent's method."""

    def func_z(z):
        return float(func(curve.to_param(z)))

    roots = []
    for z in curve.search_grids(center):

        with np.errstate(all="ignore"):
            values = np.asarray(func(curve.to_param(z)), dtype=float)

        finite = np.isfinite(values)
        roots.extend(curve.to_param(z[finite & (values == 0)]))

        sign = np.sign(values)
        changes = finite[:-1] & finite[1:] & (sign[:-1] * sign[1:] < 0)
        for index in np.flatnonzero(changes):
            z_root = scipy.optimize.brentq(func_z, z[index], z[index + 1], xtol=1e-14, maxiter=200)
            roots.append(float(curve.to_param(z_root)))

        roots = list(_unique(roots, curve)) if roots else []
        if len(roots) >= max_roots:
            break

    return np.array(roots, dtype=float)


def tangent_points(domain, point):
    """Parameters at which the tangent lines drawn from `point` touch the inner boundary.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    point : array_like
        A point outside the closure of Omega_1.

    Returns
    -------
    touch_params : numpy.ndarray
        Sorted array of the touching parameters on the inner boundary. For a
        point strictly outside the closure of Omega_1 this normally has two
        entries.

    """
    point = np.asarray(point, dtype=float)
    inner = domain.inner

    def tangency(s):
        return cross(inner.eval(s) - point, inner.d1(s))

    try:
        return _roots(inner, tangency, center=inner.guess_z(point))
    except (RuntimeError, ValueError) as error:
        raise NoTangent(f"root refinement failed for the tangents from {point}: {error}")


def tangent(domain, u, side):
    """Tangent segment drawn from the outer boundary point g(u) to Omega_1.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    u : float
        Parameter of the source point on the outer boundary.
    side : {'left', 'right'}
        Which of the two tangents to return.

    Returns
    -------
    tangent : Tangent

    Raises
    ------
    NoTangent
        If g(u) lies in the closure of Omega_1, or the two tangents cannot
        be found or told apart.

    """
    if side not in (LEFT, RIGHT):
        raise ValueError("'side' must be either 'left' or 'right'")

    source = np.asarray(domain.outer.eval(u), dtype=float)
    if domain.inner_region(source) <= ON:
        raise NoTangent(f"g({u}) lies in the closure of the inner set")

    touch_params = tangent_points(domain, source)
    if len(touch_params) < 2:
        raise NoTangent(f"found {len(touch_params)} tangents from g({u}) instead of 2")

    direction = domain.outer.orientation * np.asarray(domain.outer.d1(u), dtype=float)
    touches = np.asarray(domain.inner.eval(touch_params), dtype=float)
    vectors = touches - source

    # counter-clockwise angle from the oriented direction of the outer boundary
    sweep = np.mod(np.arctan2(cross(direction, vectors), vectors @ direction), 2 * np.pi)
    order = np.argsort(sweep)
    if abs(sweep[order[0]] - sweep[order[1]]) < 1e-12:
        raise NoTangent(f"the tangents from g({u}) cannot be told apart")

    index = order[0] if side == LEFT else order[-1]
    vector = vectors[index]

    return Tangent(
        source_param=float(u),
        touch_param=float(touch_params[index]),
        length=float(np.linalg.norm(vector)),
        angle=float(np.arctan2(vector[1], vector[0])),
        side=side,
        source=tuple(source),
        touch=tuple(touches[index]),
    )


def boundary_hits(curve, point, direction, center=None):
    """Intersections of the line through `point` along `direction` with `curve`.

    Returns
    -------
    distances : numpy.ndarray
        Signed multiples of `direction` at which the line meets the curve.
    params : numpy.ndarray
        The curve parameters of the intersections.

    Grazing contacts, where the line touches the curve without crossing it,
    are not reported.
    """
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)

    def crossing(t):
        return cross(curve.eval(t) - point, direction)

    center = curve.guess_z(point) if center is None else center
    params = _roots(curve, crossing, center=center)
    if len(params) == 0:
        return np.zeros(0), np.zeros(0)

    distances = (curve.eval(params) - point) @ direction / (direction @ direction)
    order = np.argsort(distances)
    return distances[order], params[order]


def ray_exit(curve, points, directions, max_length=1e8):
    """Distance along unit `directions` at which rays from `points` leave the set bounded by `curve`.

    The rays start inside the convex set; the crossing is bracketed by
    doubling and then located by vectorised bisection. Rays that never leave
    the set within `max_length` get ``numpy.inf``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))

    def outside(length):
        with np.errstate(all="ignore"):
            level = curve.level(points + length[:, np.newaxis] * directions)
        return ~(level < 0)

    lo = np.zeros(len(points))
    hi = np.full(len(points), 1e-6)
    expanding = ~outside(hi)
    while np.any(expanding):
        lo[expanding] = hi[expanding]
        hi[expanding] *= 2
        expanding &= (hi < max_length) & ~outside(hi)

    escaped = ~outside(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        crossed = outside(mid)
        hi = np.where(crossed, mid, hi)
        lo = np.where(crossed, lo, mid)

    return np.where(escaped, np.inf, 0.5 * (lo + hi))


def tangent_chord(domain, s):
    """Chord of the outer boundary along the tangent line of the inner boundary at h(s).

    Returns
    -------
    params : tuple of float
        Outer boundary parameters of the backward and forward ends of the chord.
    points : numpy.ndarray
        The two end points, with shape (2, 2).

    Raises
    ------
    NoTangent
        If the tangent line does not meet the outer boundary on both sides.

    """
    touch = np.asarray(domain.inner.eval(s), dtype=float)
    direction = np.asarray(domain.inner.unit_tangent(s), dtype=float)
    distances, params = boundary_hits(domain.outer, touch, direction)

    if len(distances) != 2 or not (distances[0] < 0 < distances[1]):
        raise NoTangent(f"the tangent line at h({s}) does not cross the outer boundary twice")

    return (float(params[0]), float(params[1])), domain.outer.eval(params)


def segment_in_domain(domain, p, q, samples=64):
    """Sampled test that the segment [p, q] lies in the annular domain.

    The check evaluates the `samples` interior points ``p + j (q - p) / (samples + 1)``.
    A point fails if it lies strictly inside Omega_1 or outside the closure
    of Omega_0, both up to the domain tolerance. The test is therefore
    resolution limited: thin incursions into Omega_1 between two samples go
    undetected. Sample sets are nested whenever ``samples + 1`` divides the
    finer ``samples + 1``, and refining a nested sample set never turns a
    failing segment into a passing one.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    p, q : array_like
        End points of the segment, both in the domain.
    samples : int, optional
        Number of interior sample points.

    Returns
    -------
    bool

    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if samples < 1:
        raise ValueError("'samples' must be a positive integer")

    if np.array_equal(p, q):
        return bool(domain.contains(p))

    # a canonical order makes the result exactly symmetric in p and q
    if tuple(p) > tuple(q):
        p, q = q, p

    weights = np.arange(1, samples + 1) / (samples + 1)
    points = p + weights[:, np.newaxis] * (q - p)

    with np.errstate(all="ignore"):
        inner = domain.inner.level(points)
        outer = domain.outer.level(points)

    return bool(np.all(inner >= -domain.tol) and np.all(outer <= domain.tol))


def check_unboundedness(domain, radius=1e3):
    """Check that both boundaries leave every disk of the given `radius`.

    Only the search window of each curve is examined, so a passing verdict
    means the domain is consistent with being unbounded.
    """
    rows = []
    for label, curve in (("outer", domain.outer), ("inner", domain.inner)):
        if curve.periodic:
            rows.append([label, "closed", np.nan, False])
            continue

        z = list(curve.search_grids())[-1]
        with np.errstate(all="ignore"):
            norms = np.linalg.norm(curve.eval(curve.to_param(z[[0, -1]])), axis=-1)
        for end, norm in zip(("start", "end"), norms):
            rows.append([label, end, norm, bool(norm >= radius)])

    table = pd.DataFrame(rows, columns=["boundary", "end", "norm", "escapes"])
    unbounded = table.groupby("boundary")["escapes"].any().all()
    verdict = "consistent with unbounded" if unbounded else "bounded"
    return ConditionReport("unboundedness", verdict, table, {"radius": radius})


def _inward_points(curve, depths):
    """Points of `curve` pushed into the convex set it bounds, by several depths."""
    t = curve.to_param(next(curve.search_grids())[::128])
    with np.errstate(all="ignore"):
        normal = curve.unit_tangent(t) @ _rotation(np.pi / 2).T
        points = curve.eval(t)[np.newaxis, :, :] + np.asarray(depths)[:, np.newaxis, np.newaxis] * normal
        points = points.reshape(-1, 2)
        level = curve.level(points)
    return points[level < 0]


def _ray_fits(curve, bases, direction, lengths):
    """Index of the first base whose sampled ray stays in the set bounded by `curve`, or -1."""
    if len(bases) == 0:
        return -1
    points = bases[:, np.newaxis, :] + lengths[np.newaxis, :, np.newaxis] * direction
    with np.errstate(all="ignore"):
        level = curve.level(points)
    fits = np.all(level < 0, axis=1)
    return int(np.argmax(fits)) if np.any(fits) else -1


def check_ray_condition(domain, directions=72, horizon=1e4, samples=200):
    """Check that every ray inside Omega_0 has a translate inside Omega_1.

    A direction is admissible if a sampled ray of length `horizon` fits in
    Omega_0 from one of a set of candidate base points. For each admissible
    direction a translate is searched among base points inside Omega_1.
    The result is a heuristic certificate, not a proof.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    directions : int, optional
        Number of equally spaced ray directions.
    horizon : float, optional
        Length of the sampled rays.
    samples : int, optional
        Number of geometrically spaced points sampled along each ray.

    Returns
    -------
    report : ConditionReport
        The table has one row per direction. The verdict is ``'pass'`` if
        there is at least one admissible direction and every admissible
        direction has a translate in Omega_1, ``'fail'`` otherwise.

    """
    depths = (1e-2, 1e-1, 1.0, 10.0, 100.0)
    inner_bases = _inward_points(domain.inner, depths)
    outer_bases = np.concatenate([inner_bases, _inward_points(domain.outer, depths)])
    lengths = np.geomspace(1e-3, horizon, samples)

    rows = []
    for angle in np.arange(directions) * 2 * np.pi / directions:
        direction = np.array([np.cos(angle), np.sin(angle)])
        admissible = _ray_fits(domain.outer, outer_bases, direction, lengths) >= 0
        base = _ray_fits(domain.inner, inner_bases, direction, lengths) if admissible else -1
        x1, x2 = inner_bases[base] if base >= 0 else (np.nan, np.nan)
        rows.append([angle, admissible, base >= 0, x1, x2])

    table = pd.DataFrame(rows, columns=["direction", "admissible", "translate_found", "base_x1", "base_x2"])
    admissible = table["admissible"]
    passed = admissible.any() and table.loc[admissible, "translate_found"].all()

    return ConditionReport(
        "ray", "pass" if passed else "fail", table,
        {"admissible_directions": int(admissible.sum()), "horizon": horizon}
    )


def classify_growth(windows, partials, threshold=0.8):
    """Classify partial integrals over increasing windows as diverging or inconclusive.

    The windows double in size. If the increment over the last doubling is
    at least `threshold` times the previous increment, the partial integrals
    are classified as ``'diverges'``; a logarithmically growing integral has a
    ratio close to 1. Anything else is ``'inconclusive'``: the partial sums
    never certify convergence.

    Returns
    -------
    verdict : str
    ratio : float
        Ratio of the last two increments, ``nan`` if undefined.
    slope : float
        Slope of a linear fit of the partial integrals against the logarithm
        of the window size.

    """
    windows = np.asarray(windows, dtype=float)
    partials = np.asarray(partials, dtype=float)

    positive = windows > 0
    if positive.sum() < 3 or not np.all(np.isfinite(partials)):
        return "inconclusive", np.nan, np.nan

    slope = np.polyfit(np.log(windows[positive]), partials[positive], 1)[0]

    increments = np.diff(partials[positive])
    if increments[-2] <= 0:
        return "inconclusive", np.nan, slope

    ratio = increments[-1] / increments[-2]
    verdict = "diverges" if ratio >= threshold else "inconclusive"
    return verdict, ratio, slope


def check_divergence_condition(domain, t0=0.0, horizon=8.0, windows=8, grid=2049):
    """Probe the divergence of the integrals of 1/l_R and 1/l_L along the inner boundary.

    The right tangent touching the inner boundary at h(s) starts at the point
    where the forward tangent ray at h(s) meets the outer boundary, and the
    left tangent at the point where the backward ray meets it. The integral
    of the reciprocal length of the right tangents against arclength is
    accumulated from `t0` toward the start of the inner parameter range, and
    that of the left tangents toward its end.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    t0 : float, optional
        Inner boundary parameter where the integration starts.
    horizon : float, optional
        Size of the largest window, measured in search coordinates of the
        inner curve (the parameter itself for curves parametrised over the
        whole real line).
    windows : int, optional
        Number of nested windows, each twice the size of the previous one.
    grid : int, optional
        Number of quadrature nodes over the largest window.

    Returns
    -------
    report : ConditionReport
        The table lists the partial integrals per side and window. The
        verdict is ``'diverges'`` if both sides grow without bound and
        ``'inconclusive'`` otherwise; convergence is never claimed.

    Raises
    ------
    QuadratureFailure
        If a tangent length cannot be evaluated inside the window.

    """
    if horizon < 0:
        raise ValueError("'horizon' must be greater than or equal to 0")

    if windows < 3:
        raise ValueError("'windows' must be at least 3")

    inner = domain.inner
    closed = inner.periodic
    if closed:
        horizon = min(horizon, np.diff(inner.param_range)[0])

    sizes = horizon / 2.0 ** np.arange(windows - 1, -1, -1)
    z0 = float(inner.to_z(t0))

    rows, details, verdicts = [], {}, []
    for side, sign in ((RIGHT, -1), (LEFT, 1)):

        if horizon == 0:
            partials = np.zeros(windows)
        else:
            z = z0 + sign * inner.orientation * np.linspace(0, horizon, grid)
            t = inner.to_param(z)
            directions = inner.unit_tangent(t) * (1 if side == RIGHT else -1)
            lengths = ray_exit(domain.outer, inner.eval(t), directions)

            if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
                raise QuadratureFailure(
                    f"the {side} tangent length is not finite inside the window starting at {t0}"
                )

            speed = np.linalg.norm(inner.d1(t), axis=-1) * inner.param_speed(z)
            cumulative = scipy.integrate.cumulative_trapezoid(speed / lengths, dx=horizon / (grid - 1), initial=0)
            nodes = np.rint(sizes / horizon * (grid - 1)).astype(int)
            partials = cumulative[nodes]

        verdict, ratio, slope = classify_growth(sizes, partials)
        if closed:
            # a closed curve has finite length, so its integrals always plateau
            verdict = "inconclusive"

        verdicts.append(verdict)
        details[f"{side}_ratio"] = ratio
        details[f"{side}_slope"] = slope
        rows.extend([side, size, partial] for size, partial in zip(sizes, partials))

    table = pd.DataFrame(rows, columns=["side", "window", "partial_integral"])
    verdict = "diverges" if all(v == "diverges" for v in verdicts) else "inconclusive"
    return ConditionReport("divergence", verdict, table, details)


def finite_difference_errors(callbacks, params, step=1e-5):
    """Largest relative mismatch between successive callbacks and central differences.

    Parameters
    ----------
    callbacks : sequence of callables
        A function followed by its successive derivatives.
    params : array_like
        Parameters at which the derivatives are compared.
    step : float, optional
        Step of the central differences.

    Returns
    -------
    errors : list of float
        One entry for each derivative in `callbacks[1:]`.

    """
    params = np.asarray(params, dtype=float)
    errors = []
    for function, derivative in zip(callbacks[:-1], callbacks[1:]):
        with np.errstate(all="ignore"):
            difference = (np.asarray(function(params + step)) - np.asarray(function(params - step))) / (2 * step)
            exact = np.asarray(derivative(params), dtype=float)
        error = np.abs(difference - exact) / np.maximum(1.0, np.abs(exact))
        errors.append(float(np.nanmax(error)))
    return errors


def check_derivatives(curve, params=None, step=1e-5, tol=1e-6):
    """Compare the derivative callbacks of a boundary curve against finite differences."""
    if params is None:
        params = curve.to_param(np.linspace(-2, 2, 41))

    errors = finite_difference_errors([curve.eval, curve.d1, curve.d2, curve.d3], params, step)
    table = pd.DataFrame({"derivative": ["d1", "d2", "d3"], "error": errors})
    verdict = "pass" if max(errors) <= tol else "fail"
    return ConditionReport("derivatives", verdict, table, {"curve": curve.name, "tol": tol})

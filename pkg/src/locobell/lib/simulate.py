# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Admissible step functions --- :mod:`locobell.lib.simulate`
============================================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module constructs functions :math:`\\varphi: [0, 1] \\to \\partial\\Omega_0`
whose averages over every subinterval :math:`J` avoid the open set
:math:`\\Omega_1`, and uses them to bound the Bellman function

.. math::

    B_{\\Omega, f}(x) = \\sup\\{\\langle f(\\varphi) \\rangle_{[0,1]} :
    \\langle \\varphi \\rangle_{[0,1]} = x\\}

from below. Every candidate is a :class:`StepFunction` obtained by splitting
the point :math:`x` along segments inside :math:`\\Omega` until the pieces
reach :math:`\\partial\\Omega_0`. The splits form a :class:`SplitTree`, whose
weights are kept as exact fractions. Averages over the nested intervals of
the tree reproduce the points of the tree by construction; averages over
all other subintervals are checked afterwards by :func:`membership_check`,
and a candidate that fails is discarded.

Three splitting policies are available:

  - ``'tangent'`` : split along a tangent line drawn from the point to
    :math:`\\Omega_1`, so that the pieces graze the inner boundary
  - ``'random'`` : split along a random direction
  - ``'axis'`` : try the horizontal and the vertical direction first

Points of :math:`\\partial\\Omega_1` are always split along the tangent line of
the inner boundary.

Example usage
-------------

::

  from locobell.lib.presets import bmo_domain, boundary_data
  from locobell.lib.simulate import lower_bound

  domain = bmo_domain(epsilon=0.5)
  curve = boundary_data(domain, "exp")

  value, phi = lower_bound(domain, curve, x=(0.0, 0.25), budget=100, seed=0)

`value` is the average of :math:`\\tilde f` over the pieces of the witness
`phi`, and ``phi.to_dataframe()`` lists its pieces.

The duality gap between the lower bound and an upper bound given by a
majorant field can be measured at many points at once::

  from locobell.lib.simulate import DualityGap

  gap = DualityGap(domain, curve, field, points, budget=100).run()
  gap.results

The functions and classes
-------------------------

.. autoclass:: StepFunction
    :members:

.. autoclass:: SplitTree
    :members:

.. autofunction:: membership_check

.. autofunction:: grow_split_tree

.. autofunction:: tree_to_step_function

.. autofunction:: lower_bound

.. autoclass:: DualityGap
    :members:

"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import pandas as pd

from locobell.lib.base import AnalysisBase
from locobell.lib.exceptions import NoCandidate, NoDataError, NoTangent, StuckPoint
from locobell.lib.geometry import ON, boundary_hits, segment_in_domain, tangent_chord, tangent_points

logger = logging.getLogger(__name__)

__all__ = [
    "StepFunction",
    "SplitNode",
    "SplitTree",
    "membership_check",
    "grow_split_tree",
    "tree_to_step_function",
    "lower_bound",
    "DualityGap",
]

POLICIES = ("tangent", "random", "axis")


class StepFunction:
    """A piecewise constant function on [0, 1] valued on a boundary curve.

    Parameters
    ----------
    breakpoints : array_like
        Increasing breakpoints, starting at 0 and ending at 1.
    params : array_like
        Curve parameter of each piece; one fewer than the breakpoints.
    curve : BoundaryCurve
        The curve the function takes its values on.
    exact_breakpoints : sequence of fractions.Fraction, optional
        The breakpoints as exact fractions, when known.

    """

    def __init__(self, breakpoints, params, curve, exact_breakpoints=None):

        breakpoints = np.asarray(breakpoints, dtype=float)
        params = np.atleast_1d(np.asarray(params, dtype=float))

        if len(breakpoints) != len(params) + 1:
            raise ValueError("'breakpoints' must have one more entry than 'params'")

        if breakpoints[0] != 0 or breakpoints[-1] != 1:
            raise ValueError("'breakpoints' must start at 0 and end at 1")

        if np.any(np.diff(breakpoints) <= 0):
            raise ValueError("'breakpoints' must be strictly increasing")

        self.breakpoints = breakpoints
        self.params = params
        self.curve = curve
        self.exact_breakpoints = exact_breakpoints

        self.lengths = np.diff(breakpoints)
        self.points = np.atleast_2d(np.asarray(curve.eval(params), dtype=float))
        self._cumulative = {}

    def __len__(self):
        return len(self.params)

    def _integral_to(self, values, cumulative, s):
        s = np.asarray(s, dtype=float)
        piece = np.clip(np.searchsorted(self.breakpoints, s, side="right") - 1, 0, len(self) - 1)
        offset = (s - self.breakpoints[piece])
        if values.ndim > 1:
            offset = offset[..., np.newaxis]
        return cumulative[piece] + offset * values[piece]

    def average_of(self, values, lo, hi):
        """Averages over [lo, hi] of the step function taking `values` on its pieces.

        The integral is piecewise linear in the interval ends, so the averages
        are exact up to rounding.
        """
        values = np.asarray(values, dtype=float)
        weights = self.lengths.reshape((-1,) + (1,) * (values.ndim - 1))
        cumulative = np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(weights * values, axis=0)])

        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        width = hi - lo
        if values.ndim > 1:
            width = width[..., np.newaxis]
        return (self._integral_to(values, cumulative, hi) - self._integral_to(values, cumulative, lo)) / width

    def average(self, lo=0.0, hi=1.0):
        """Average of the function over [lo, hi], a point of the plane."""
        return self.average_of(self.points, lo, hi)

    def mean_value(self, f_tilde):
        """Average of the boundary data over [0, 1], weighted by piece lengths."""
        return float(np.sum(self.lengths * np.asarray(f_tilde(self.params), dtype=float)))

    def scan_ends(self, window_grid=64):
        """Breakpoints merged with a uniform grid of `window_grid` intervals."""
        return np.union1d(self.breakpoints, np.linspace(0, 1, window_grid + 1))

    @staticmethod
    def subinterval_pairs(ends):
        """Left and right ends of every subinterval with both ends in `ends`."""
        first, second = np.triu_indices(len(ends), k=1)
        return ends[first], ends[second]

    def to_dataframe(self):
        """The pieces as a table, one row per piece."""
        return pd.DataFrame({
            "left": self.breakpoints[:-1],
            "right": self.breakpoints[1:],
            "param": self.params,
            "x1": self.points[:, 0],
            "x2": self.points[:, 1],
        })


def membership_check(domain, phi, window_grid=64):
    """Check that the averages of `phi` over scanned subintervals avoid Omega_1.

    Every subinterval whose ends belong to the union of the breakpoints of
    `phi` and a uniform grid of `window_grid` intervals is scanned.
    Averages over unions of whole pieces are therefore exact.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    phi : StepFunction
        A step function valued on the outer boundary of `domain`.
    window_grid : int, optional
        Number of intervals of the uniform grid, at least 1.

    Returns
    -------
    ok : bool
        Whether no scanned average lies in the open set Omega_1.
    worst : float
        The smallest value of the inner level function over the scanned
        averages: its distance below zero measures the worst violation.

    """
    if window_grid < 1:
        raise ValueError("'window_grid' must be a positive integer")

    lo, hi = phi.subinterval_pairs(phi.scan_ends(window_grid))
    averages = phi.average(lo, hi)
    with np.errstate(all="ignore"):
        margins = np.asarray(domain.inner.level(averages), dtype=float)
    margins = np.where(np.isnan(margins), np.inf, margins)

    worst = float(np.min(margins))
    return worst >= -domain.tol, worst


@dataclass
class SplitNode:
    """A node of a split tree.

    A leaf lies on the outer boundary and carries its parameter. An inner
    node carries the weight `weight` of its `plus` child, so that
    ``point = weight * plus.point + (1 - weight) * minus.point``.
    """

    point: np.ndarray
    param: Optional[float] = None
    weight: Optional[Fraction] = None
    minus: Optional["SplitNode"] = None
    plus: Optional["SplitNode"] = None

    @property
    def is_leaf(self):
        return self.minus is None


class SplitTree:
    """A binary tree of splits of a point of the domain along segments inside it."""

    def __init__(self, root, domain):
        self.root = root
        self.domain = domain

    def nodes(self):
        """Iterate over the nodes, parents before children."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.extend([node.plus, node.minus])

    def leaves(self):
        return [node for node in self.nodes() if node.is_leaf]

    @property
    def depth(self):
        def _depth(node):
            return 0 if node.is_leaf else 1 + max(_depth(node.minus), _depth(node.plus))
        return _depth(self.root)

    def intervals(self):
        """Yield every node with its subinterval of [0, 1] as exact fractions.

        The `minus` child takes the left part of its parent's interval, of
        relative length ``1 - weight``.
        """
        stack = [(self.root, Fraction(0), Fraction(1))]
        while stack:
            node, lo, hi = stack.pop()
            yield node, lo, hi
            if not node.is_leaf:
                middle = lo + (1 - node.weight) * (hi - lo)
                stack.extend([(node.plus, middle, hi), (node.minus, lo, middle)])

    def check(self, tol=1e-12, samples=64):
        """Whether every split is a convex combination along a segment inside the domain."""
        for node in self.nodes():
            if node.is_leaf:
                continue
            weight = float(node.weight)
            combination = weight * node.plus.point + (1 - weight) * node.minus.point
            scale = max(1.0, float(np.max(np.abs(node.point))))
            if np.max(np.abs(combination - node.point)) > tol * scale:
                return False
            if not segment_in_domain(self.domain, node.minus.point, node.plus.point, samples=samples):
                return False
        return True


class _Splitter:
    """Recursive construction of split trees under one splitting policy."""

    def __init__(self, domain, policy, rng, stride=None, first_touch=None, tries=16):
        self.domain = domain
        self.policy = policy
        self.rng = rng
        self.stride = stride
        self.first_touch = first_touch
        self.tries = tries

    def leaf(self, param):
        param = float(param)
        return SplitNode(point=np.asarray(self.domain.outer.eval(param), dtype=float), param=param)

    def grow(self, x, depth, avoid=None):

        domain = self.domain
        if domain.outer_region(x) == ON:
            return self.leaf(domain.outer.nearest_param(x))

        if depth == 0:
            raise StuckPoint(f"{tuple(x)} is not on the outer boundary and the depth is exhausted")

        if domain.inner_region(x) == ON:
            s = domain.inner.nearest_param(x)
            params, _ = tangent_chord(domain, s)
            minus, plus = self.leaf(params[0]), self.leaf(params[1])
            return self.join(x, minus, plus)

        if self.policy == "tangent":
            return self.split_tangent(x, depth, avoid)
        return self.split_line(x, depth)

    def join(self, x, minus, plus):
        """The inner node of `x` with children `minus` and `plus`."""
        span = plus.point - minus.point
        weight = Fraction(float((x - minus.point) @ span / (span @ span)))
        if not 0 < weight < 1:
            raise StuckPoint(f"{tuple(x)} does not lie between the ends of its split")
        return SplitNode(point=np.asarray(x, dtype=float), weight=weight, minus=minus, plus=plus)

    def split_tangent(self, x, depth, avoid):

        domain = self.domain
        touches = list(tangent_points(domain, x))
        if not touches:
            raise StuckPoint(f"no tangent from {tuple(x)} to the inner set")

        if avoid is not None and len(touches) > 1:
            touches.sort(key=lambda s: -abs(s - avoid))
            choice = touches[0]
        elif self.first_touch is not None:
            choice = touches[self.first_touch % len(touches)]
            self.first_touch = None
        else:
            choice = touches[self.rng.integers(len(touches))]

        touch = np.asarray(domain.inner.eval(choice), dtype=float)
        direction = touch - x
        distances, params = boundary_hits(domain.outer, x, direction)
        behind = distances < 0
        ahead = distances > 1
        if not behind.any() or not ahead.any():
            raise StuckPoint(f"the tangent line from {tuple(x)} does not cross the outer boundary twice")

        minus = self.leaf(params[behind][-1])
        far = np.asarray(domain.outer.eval(params[ahead][0]), dtype=float)

        stride = 1.0 if depth == 1 else (self.stride if self.stride is not None else self.rng.uniform())
        if stride >= 1.0:
            plus = self.leaf(params[ahead][0])
        else:
            target = touch + stride * (far - touch)
            plus = self.grow(target, depth - 1, avoid=choice)

        return self.join(x, minus, plus)

    def directions(self):
        if self.policy == "axis":
            yield np.array([1.0, 0.0])
            yield np.array([0.0, 1.0])
        for _ in range(self.tries):
            angle = self.rng.uniform(0, np.pi)
            yield np.array([np.cos(angle), np.sin(angle)])

    def end(self, x, direction, forward):
        """Where the ray from `x` along +/- `direction` first meets the boundary of the domain."""
        domain = self.domain
        sign = 1 if forward else -1
        distances, params = boundary_hits(domain.outer, x, direction)
        outer = [(sign * d, "outer", p) for d, p in zip(distances, params) if sign * d > 0]
        distances, params = boundary_hits(domain.inner, x, direction)
        inner = [(sign * d, "inner", p) for d, p in zip(distances, params) if sign * d > 0]
        hits = sorted(outer + inner)
        return hits[0] if hits else None

    def split_line(self, x, depth):

        for direction in self.directions():
            ends = [self.end(x, direction, forward) for forward in (False, True)]
            if any(end is None for end in ends):
                continue

            children = []
            for _, boundary, param in ends:
                if boundary == "outer":
                    children.append(self.leaf(param))
                else:
                    point = np.asarray(self.domain.inner.eval(param), dtype=float)
                    children.append(point)

            try:
                children = [
                    child if isinstance(child, SplitNode) else self.grow(child, depth - 1)
                    for child in children
                ]
                return self.join(x, *children)
            except (StuckPoint, NoTangent):
                continue

        raise StuckPoint(f"no admissible split direction through {tuple(x)} after {self.tries} tries")


def grow_split_tree(domain, x, policy="tangent", depth=8, rng=None, stride=None, first_touch=None):
    """Split the point `x` along segments inside the domain until the pieces reach the outer boundary.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    x : array_like
        A point of the domain.
    policy : {'tangent', 'random', 'axis'}, optional
        How split directions are chosen.
    depth : int, optional
        Largest depth of the tree.
    rng : int or numpy.random.Generator, optional
        Seed or generator for the random choices.
    stride : float, optional
        For the tangent policy, the fraction of the way from the point of
        tangency to the outer boundary at which the far end of a split is
        placed. Random when not given; a stride of 1 ends the split on the
        outer boundary.
    first_touch : int, optional
        For the tangent policy, index of the tangent used by the first split.

    Returns
    -------
    tree : SplitTree

    Raises
    ------
    StuckPoint
        If a point that is not on the outer boundary cannot be split within
        the depth or the angular search budget.

    """
    if policy not in POLICIES:
        raise ValueError(f"'policy' must be one of {POLICIES}")

    if depth < 0:
        raise ValueError("'depth' must be greater than or equal to 0")

    x = np.asarray(x, dtype=float)
    if not domain.contains(x):
        raise ValueError(f"'x' must be a point of the domain, got {tuple(x)}")

    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    splitter = _Splitter(domain, policy, rng, stride=stride, first_touch=first_touch)
    try:
        root = splitter.grow(x, depth)
    except NoTangent as error:
        raise StuckPoint(str(error))
    return SplitTree(root, domain)


def tree_to_step_function(tree):
    """Unfold a split tree into a step function on [0, 1].

    Each node receives a subinterval of its parent's, the `plus` child a
    fraction `weight` of it, so that the average over the subinterval of a
    node is the point of that node. The interval bookkeeping uses exact
    fractions.
    """
    pieces = sorted(
        (lo, hi, node.param) for node, lo, hi in tree.intervals() if node.is_leaf
    )
    exact = [pieces[0][0]] + [hi for _, hi, _ in pieces]
    return StepFunction(
        breakpoints=[float(b) for b in exact],
        params=[param for _, _, param in pieces],
        curve=tree.domain.outer,
        exact_breakpoints=tuple(exact),
    )


def lower_bound(domain, curve, x, budget=100, seed=0, depth=8, window_grid=64, policies=POLICIES):
    """Certified lower bound of the Bellman function at `x`.

    Candidate step functions are grown with the splitting policies in turn.
    The first two candidates split `x` along each of its two tangent lines
    straight to the outer boundary; later candidates use random choices
    seeded by ``(seed, i)``, so a larger budget only adds candidates. Each
    candidate must pass :func:`membership_check`; the best passing one is
    returned.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    curve : LiftedCurve
        The boundary data.
    x : array_like
        A point of the domain.
    budget : int, optional
        Number of candidates.
    seed : int, optional
        Seed of the candidate search.
    depth : int, optional
        Largest depth of the split trees.
    window_grid : int, optional
        Grid of the membership check.
    policies : sequence of str, optional
        Splitting policies used in turn.

    Returns
    -------
    value : float
        The average of the boundary data over the witness.
    phi : StepFunction
        The witness.

    Raises
    ------
    NoCandidate
        If no candidate passes the membership check.

    """
    if budget < 1:
        raise ValueError("'budget' must be a positive integer")

    x = np.asarray(x, dtype=float)
    if domain.outer_region(x) == ON:
        param = domain.outer.nearest_param(x)
        phi = StepFunction([0.0, 1.0], [param], domain.outer, exact_breakpoints=(Fraction(0), Fraction(1)))
        return phi.mean_value(curve.f_tilde), phi

    best_value, best_phi = -np.inf, None
    for i in range(budget):

        rng = np.random.default_rng([seed, i])
        if i < 2:
            options = dict(policy="tangent", stride=1.0, first_touch=i)
        else:
            options = dict(policy=policies[i % len(policies)])

        try:
            tree = grow_split_tree(domain, x, depth=depth, rng=rng, **options)
        except StuckPoint as error:
            logger.debug(f"candidate {i} at {tuple(x)}: {error}")
            continue

        phi = tree_to_step_function(tree)
        ok, worst = membership_check(domain, phi, window_grid=window_grid)
        if not ok:
            logger.debug(f"candidate {i} at {tuple(x)} fails the membership check by {-worst}")
            continue

        value = phi.mean_value(curve.f_tilde)
        if value > best_value:
            best_value, best_phi = value, phi

    if best_phi is None:
        raise NoCandidate(f"none of the {budget} candidates at {tuple(x)} passed the membership check")

    return best_value, best_phi


class DualityGap(AnalysisBase):
    """Gap between a certified lower bound and a majorant at many points.

    For each point the lower bound comes from :func:`lower_bound` and the
    upper value from interpolating a majorant field, typically the result of
    :func:`locobell.lib.concavify.minimal_concave_majorant`.
    """

    def __init__(self, domain, curve, field, points, budget=100, seed=0, depth=8, window_grid=64,
                 verbose=False):
        """Set up parameters for the duality gap.

        Parameters
        ----------
        domain : Domain
            The annular domain.
        curve : LiftedCurve
            The boundary data.
        field : ScalarField
            A majorant field offering ``interpolate(points)``.
        points : array_like
            Points of the domain, with shape (n, 2).
        budget, seed, depth, window_grid
            Passed on to :func:`lower_bound`.
        verbose : bool, optional
            Show a progress bar.

        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != 2:
            raise ValueError("'points' must have shape (n, 2)")

        super(DualityGap, self).__init__(points, verbose=verbose)

        self.domain = domain
        self.curve = curve
        self.field = field
        self.options = dict(budget=budget, seed=seed, depth=depth, window_grid=window_grid)
        self.results = None
        self.witnesses = None

    def _prepare(self):
        self._rows = []
        self._witnesses = {}

    def _single_sample(self):

        x = self._sample
        upper = float(self.field.interpolate(x[np.newaxis, :])[0])

        try:
            lower, phi = lower_bound(self.domain, self.curve, x, **self.options)
            status = "ok"
            self._witnesses[self.indices[self._sample_index]] = phi
        except NoCandidate:
            lower, status = np.nan, "no candidate"

        gap = upper - lower
        relative = gap / max(abs(upper), 1e-300)
        self._rows.append([x[0], x[1], lower, upper, gap, relative, status])

    def _conclude(self):
        self.results = pd.DataFrame(
            self._rows, columns=["x1", "x2", "lower", "upper", "gap", "rel_gap", "status"]
        )
        self.witnesses = self._witnesses

    @property
    def max_gap(self):
        """Largest gap over the points with a lower bound."""
        if self.results is None:
            raise NoDataError(".max_gap is only available after calling `DualityGap.run()`")
        return float(self.results["gap"].max())

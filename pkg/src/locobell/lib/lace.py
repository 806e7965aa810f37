# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Lifted curves --- :mod:`locobell.lib.lace`
============================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module provides the space curve :math:`\\gamma(t) = (g_1(t), g_2(t), \\tilde f(t))`
obtained by lifting the outer boundary :math:`g` of a domain with the boundary
data :math:`\\tilde f = f \\circ g`, and the local structures that the torsion of
:math:`\\gamma` seeds in the extremal foliation.

The sign of the torsion of :math:`\\gamma` equals the sign of the triple product
:math:`\\det[\\gamma', \\gamma'', \\gamma''']`. For the parabolic strip
:math:`g(t) = (t, t^2)` this determinant equals :math:`2 \\tilde f'''(t)`.
Points where the torsion changes sign from + to - are *cup* candidates: a
family of chords :math:`[g(a), g(b)]` grows out of each of them, every chord
solving the cup equation

.. math::

    \\det\\begin{pmatrix}
    \\gamma'(a) \\\\ \\gamma'(b) \\\\ \\gamma(b) - \\gamma(a)
    \\end{pmatrix} = 0,

that is, the tangents of :math:`\\gamma` at both ends and the chord of
:math:`\\gamma` lie in one plane.

Input
-----

Required:
  - *base* : :class:`locobell.lib.geometry.BoundaryCurve` of the outer boundary
  - *f_tilde*, *f_tilde_d1*, *f_tilde_d2*, *f_tilde_d3* : vectorised callbacks
    for the boundary data and its derivatives in the parameter of *base*

Options:
  - *lower_bound* : the infimum of the boundary data, if it is known
  - *smooth* : set to `False` for data that is not three times differentiable;
    such curves can be concavified and simulated but have no torsion

Output
------

  - :func:`torsion_sign_changes` returns a list of :class:`TorsionChange`
  - :func:`solve_cup_chords` returns a list of :class:`Chord`, each carrying its
    end parameters, the cup-equation residual and the two triple products of
    the chord differential inequalities

Example usage of :func:`solve_cup_chords`
-----------------------------------------

Boundary data are usually built with :func:`locobell.lib.presets.boundary_data`::

  from locobell.lib.presets import bmo_domain, boundary_data
  from locobell.lib.lace import torsion_sign_changes, solve_cup_chords

  domain = bmo_domain(epsilon=1.0)
  curve = boundary_data(domain, "power", p=4, sign=-1)

The torsion of :math:`t \\mapsto (t, t^2, -t^4)` changes sign once, from + to -,
at :math:`t = 0`::

  changes = torsion_sign_changes(curve, window=(-2, 2))

The chords solving the cup equation around that point are symmetric, and
they are followed until they stop fitting into the domain::

  chords = solve_cup_chords(curve, origin=0.0, search_window=(-3, 3), domain=domain)
  chords[-1].b  # 1.0

The functions and classes
-------------------------

.. autoclass:: LiftedCurve
    :members:

.. autoclass:: Chord

.. autofunction:: torsion_sign

.. autofunction:: torsion_sign_changes

.. autofunction:: cup_equation_residual

.. autofunction:: solve_cup_chords

.. autofunction:: chord_differential_inequalities

"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.optimize

from locobell.lib.exceptions import ChordExitsDomain, ContinuationStall, TooManyChanges
from locobell.lib.geometry import BoundaryCurve, segment_in_domain

logger = logging.getLogger(__name__)

__all__ = [
    "LiftedCurve",
    "Chord",
    "TorsionChange",
    "torsion_determinant",
    "normalized_torsion",
    "torsion_sign",
    "torsion_sign_changes",
    "cup_equation_residual",
    "midpoint_derivative_residual",
    "principal_normal",
    "chord_differential_inequalities",
    "solve_cup_chords",
]

PLUS_TO_MINUS, MINUS_TO_PLUS = "+-", "-+"


@dataclass(frozen=True, eq=False)
class LiftedCurve:
    """The space curve (g_1, g_2, f_tilde) over the outer boundary of a domain."""

    base: BoundaryCurve
    f_tilde: Callable
    f_tilde_d1: Callable
    f_tilde_d2: Callable
    f_tilde_d3: Callable
    lower_bound: Optional[float] = None
    smooth: bool = True
    name: str = "f"

    def __post_init__(self):

        if self.lower_bound is None:
            return

        if not np.isfinite(self.lower_bound):
            raise ValueError("'lower_bound' must be finite")

        t = self.base.to_param(next(self.base.search_grids())[::16])
        with np.errstate(all="ignore"):
            values = np.asarray(self.f_tilde(t), dtype=float)
        values = values[np.isfinite(values)]
        if np.any(values < self.lower_bound - 1e-12 * max(1.0, abs(self.lower_bound))):
            raise ValueError("'lower_bound' must not exceed the sampled boundary data")

    def _lift(self, planar, scalar):
        planar = np.asarray(planar, dtype=float)
        scalar = np.broadcast_to(np.asarray(scalar, dtype=float), planar.shape[:-1])
        return np.concatenate([planar, scalar[..., np.newaxis]], axis=-1)

    def gamma(self, t):
        """Points of the lifted curve."""
        return self._lift(self.base.eval(t), self.f_tilde(t))

    def d1(self, t):
        return self._lift(self.base.d1(t), self.f_tilde_d1(t))

    def d2(self, t):
        return self._lift(self.base.d2(t), self.f_tilde_d2(t))

    def d3(self, t):
        return self._lift(self.base.d3(t), self.f_tilde_d3(t))

    def require_smooth(self):
        if not self.smooth:
            raise ValueError(f"the boundary data '{self.name}' is not three times differentiable")


@dataclass(frozen=True)
class TorsionChange:
    """A sign change of the torsion of a lifted curve."""

    location: float
    direction: str

    @property
    def cup(self):
        """Whether the torsion changes from + to -, seeding a cup."""
        return self.direction == PLUS_TO_MINUS


@dataclass(frozen=True)
class Chord:
    """A chord [g(a), g(b)] of the outer boundary solving the cup equation."""

    a: float
    b: float
    residual: float
    diff_ineq_a: float
    diff_ineq_b: float

    def admissible(self, tol=1e-12):
        """Whether both triple products are negative."""
        return self.diff_ineq_a <= -tol and self.diff_ineq_b <= -tol


def _triple(u, v, w):
    return np.einsum("...i,...i->...", u, np.cross(v, w))


def torsion_determinant(curve, t):
    """The triple product det[gamma', gamma'', gamma''']."""
    curve.require_smooth()
    return _triple(curve.d1(t), curve.d2(t), curve.d3(t))


def normalized_torsion(curve, t):
    """The torsion determinant divided by |gamma'|^3 |gamma' x gamma''|.

    This is zero where the lifted curve has no curvature.
    """
    d1, d2 = curve.d1(t), curve.d2(t)
    determinant = torsion_determinant(curve, t)
    scale = np.linalg.norm(d1, axis=-1) ** 3 * np.linalg.norm(np.cross(d1, d2), axis=-1)
    return np.divide(determinant, scale, out=np.zeros_like(determinant), where=scale > 0)


def torsion_sign(curve, t, tol=1e-10):
    """Sign of the torsion of the lifted curve at `t`.

    Parameters
    ----------
    curve : LiftedCurve
        The lifted curve.
    t : float or array_like
        Parameters of the outer boundary.
    tol : float, optional
        Absolute zero band applied to the normalised torsion determinant.

    Returns
    -------
    sign : int or numpy.ndarray
        +1, 0 or -1 for each parameter.

    """
    normalized = normalized_torsion(curve, t)
    sign = np.where(np.abs(normalized) < tol, 0, np.sign(normalized)).astype(int)
    return int(sign) if sign.ndim == 0 else sign


def torsion_sign_changes(curve, window, grid=2001, max_changes=64, tol=1e-10):
    """Locate the sign changes of the torsion of the lifted curve inside `window`.

    The normalised torsion determinant is sampled on a uniform grid; grid
    points inside the zero band are skipped. Each sign flip between two
    nonzero samples is refined with Brent's method to 1e-10.

    Parameters
    ----------
    curve : LiftedCurve
        The lifted curve, which must be smooth.
    window : tuple of float
        Parameter interval to scan.
    grid : int, optional
        Number of grid points, at least 2.
    max_changes : int, optional
        Largest number of sign changes accepted.
    tol : float, optional
        Zero band of the normalised torsion determinant.

    Returns
    -------
    changes : list of TorsionChange
        Sorted by location. Changes from + to - are cup candidates.

    Raises
    ------
    TooManyChanges
        If there are more than `max_changes` sign changes.

    """
    curve.require_smooth()
    if grid < 2:
        raise ValueError("'grid' must be at least 2")

    lo, hi = window
    t = np.linspace(lo, hi, grid)
    values = normalized_torsion(curve, t)
    signs = np.where(np.abs(values) < tol, 0, np.sign(values))

    nonzero = np.flatnonzero(signs != 0)
    flips = np.flatnonzero(signs[nonzero[:-1]] != signs[nonzero[1:]])

    if len(flips) > max_changes:
        raise TooManyChanges(f"the torsion changes sign {len(flips)} times inside {window}, more than {max_changes}")

    changes = []
    for flip in flips:
        left, right = nonzero[flip], nonzero[flip + 1]
        location = scipy.optimize.brentq(
            lambda s: float(normalized_torsion(curve, s)), t[left], t[right], xtol=1e-10
        )
        direction = PLUS_TO_MINUS if signs[left] > 0 else MINUS_TO_PLUS
        changes.append(TorsionChange(location, direction))

    logger.debug(f"found {len(changes)} torsion sign changes inside {window}")
    return changes


def cup_equation_residual(curve, a, b):
    """The determinant with rows gamma'(a), gamma'(b) and gamma(b) - gamma(a).

    It vanishes exactly when the tangents of the lifted curve at `a` and
    `b` are coplanar with its chord. It is symmetric in `a` and `b`.
    """
    return _triple(curve.d1(a), curve.d1(b), curve.gamma(b) - curve.gamma(a))


def midpoint_derivative_residual(curve, a, b):
    """Residual of the cup equation written for the parabolic strip.

    On g(t) = (t, t^2) the cup equation says that the slope of f_tilde
    between `a` and `b` equals the mean of its derivatives at both ends; the
    general determinant equals ``2 (b - a)^2`` times this residual.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    slope = (curve.f_tilde(b) - curve.f_tilde(a)) / (b - a)
    return slope - 0.5 * (curve.f_tilde_d1(a) + curve.f_tilde_d1(b))


def principal_normal(curve, t):
    """Unit principal normal of the lifted curve, zero where it has no curvature."""
    d1, d2 = curve.d1(t), curve.d2(t)
    normal = np.cross(np.cross(d1, d2), d1)
    norm = np.linalg.norm(normal, axis=-1, keepdims=True)
    return np.divide(normal, norm, out=np.zeros_like(normal), where=norm > 0)


def chord_differential_inequalities(curve, chord):
    """Triple products of the chord differential inequalities.

    Parameters
    ----------
    curve : LiftedCurve
        The lifted curve.
    chord : Chord or tuple of float
        The chord, or its end parameters ``(a, b)``.

    Returns
    -------
    at_a, at_b : float
        ``det[gamma'(a), gamma(b) - gamma(a), N(a)]`` and the same with `a`
        and `b` interchanged, where N is the principal normal. The chord is
        admissible when both are negative.

    """
    a, b = (chord.a, chord.b) if isinstance(chord, Chord) else chord
    gamma_a, gamma_b = curve.gamma(a), curve.gamma(b)

    at_a = _triple(curve.d1(a), gamma_b - gamma_a, principal_normal(curve, a))
    at_b = _triple(curve.d1(b), gamma_a - gamma_b, principal_normal(curve, b))
    return float(at_a), float(at_b)


def _make_chord(curve, a, b):
    at_a, at_b = chord_differential_inequalities(curve, (a, b))
    return Chord(
        a=float(a),
        b=float(b),
        residual=float(cup_equation_residual(curve, a, b)),
        diff_ineq_a=at_a,
        diff_ineq_b=at_b,
    )


class _CupContinuation:
    """Pseudo-arclength continuation of the zero set of the scaled cup residual."""

    def __init__(self, curve, tol, max_newton=30):
        self.curve = curve
        self.tol = tol
        self.max_newton = max_newton

    def residual(self, point):
        a, b = point
        return float(cup_equation_residual(self.curve, a, b)) / (b - a) ** 4

    def gradient(self, point):
        delta = 1e-6 * max(1.0, np.max(np.abs(point)))
        gradient = np.zeros(2)
        for i in range(2):
            shift = np.zeros(2)
            shift[i] = delta
            gradient[i] = (self.residual(point + shift) - self.residual(point - shift)) / (2 * delta)
        return gradient

    def tangent(self, point, previous):
        gradient = self.gradient(point)
        tangent = np.array([-gradient[1], gradient[0]])
        tangent /= np.linalg.norm(tangent)
        return tangent if tangent @ previous > 0 else -tangent

    def correct(self, predictor, normal):
        """Newton iteration on the residual, constrained to the hyperplane through `predictor`."""
        point = predictor.copy()
        for _ in range(self.max_newton):
            residual = self.residual(point)
            if abs(residual) <= self.tol:
                return point
            jacobian = np.vstack([self.gradient(point), normal])
            rhs = np.array([residual, (point - predictor) @ normal])
            try:
                point = point - np.linalg.solve(jacobian, rhs)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(point)) or point[1] - point[0] <= 0:
                return None
        return None


def solve_cup_chords(curve, origin, search_window, domain=None, step=1e-2, min_step=1e-8,
                     max_steps=5000, tol=1e-10, samples=256, strict=False):
    """Follow the family of cup chords growing out of a torsion sign change.

    The cup equation is divided by ``(b - a)^4`` so that its zero set passes
    regularly through ``(origin, origin)``. The family is followed with a
    pseudo-arclength predictor-corrector, starting along the anti-diagonal
    direction so that ``a < origin < b``, with an initial step `step`
    that is halved whenever the corrector fails.

    Parameters
    ----------
    curve : LiftedCurve
        The lifted curve, which must be smooth.
    origin : float
        A cup candidate, where the torsion changes sign from + to -.
    search_window : tuple of float
        The chord ends must stay inside this parameter interval.
    domain : Domain, optional
        If given, every chord must fit in the domain. The family is cut at
        the first chord that does not, after locating the last fitting chord
        by bisection.
    step : float, optional
        Initial and largest continuation step.
    min_step : float, optional
        Smallest step tried before giving up.
    max_steps : int, optional
        Largest number of continuation steps.
    tol : float, optional
        Tolerance on the cup residual divided by ``(b - a)^4``. The raw
        residual stored in :attr:`Chord.residual` is up to ``(b - a)^4``
        times larger on long chords.
    samples : int, optional
        Number of samples used to check that a chord fits in the domain.
    strict : bool, optional
        If `True`, a chord leaving the domain raises :class:`ChordExitsDomain`
        instead of ending the family.

    Returns
    -------
    chords : list of Chord
        Empty if `origin` is not a change of the torsion from + to -.

    Raises
    ------
    ContinuationStall
        If the corrector fails even with the smallest step.
    ChordExitsDomain
        If `strict` is set and a chord leaves the domain.

    """
    curve.require_smooth()
    lo, hi = search_window

    delta = 1e-2 * max(1.0, abs(origin))
    changes = torsion_sign_changes(curve, (origin - delta, origin + delta), grid=201)
    cups = [change.location for change in changes if change.cup]
    if not cups:
        logger.info(f"{origin} is not a change of the torsion from + to -: no cup")
        return []

    origin = min(cups, key=lambda location: abs(location - origin))

    def fits(point):
        if domain is None:
            return True
        a, b = point
        return segment_in_domain(domain, curve.base.eval(a), curve.base.eval(b), samples=samples)

    continuation = _CupContinuation(curve, tol)
    point = np.array([origin, origin], dtype=float)
    direction = np.array([-1.0, 1.0]) / np.sqrt(2)
    h = step

    chords = []
    for _ in range(max_steps):

        predictor = point + h * direction
        corrected = continuation.correct(predictor, direction)
        if corrected is None or np.linalg.norm(corrected - point) < 0.5 * h or np.linalg.norm(corrected - predictor) > h:
            h /= 2
            if h < min_step:
                raise ContinuationStall(f"cup continuation from {origin} stalled at a={point[0]}, b={point[1]}")
            continue

        if corrected[0] < lo or corrected[1] > hi:
            break

        if not fits(corrected):
            if strict:
                raise ChordExitsDomain(f"the chord [{corrected[0]}, {corrected[1]}] leaves the domain")
            last = _last_fitting(continuation, point, corrected, fits)
            if last is not None:
                chords.append(_make_chord(curve, *last))
            break

        chords.append(_make_chord(curve, *corrected))
        direction = continuation.tangent(corrected, direction)
        point = corrected
        h = min(step, 2 * h)

    logger.debug(f"followed {len(chords)} cup chords from {origin}")
    return chords


def _last_fitting(continuation, good, bad, fits, iterations=40):
    """Bisect between a fitting and a non-fitting chord of the family."""
    normal = (bad - good) / np.linalg.norm(bad - good)
    best = None
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        point = continuation.correct(good + mid * (bad - good), normal)
        if point is not None and fits(point):
            lo, best = mid, point
        else:
            hi = mid
    return best

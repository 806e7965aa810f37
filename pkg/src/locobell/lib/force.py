# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Force integral --- :mod:`locobell.lib.force`
==============================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module evaluates the force function coming from :math:`-\\infty` along
the outer boundary :math:`g` of a domain,

.. math::

    F_R(t) = \\int_{-\\infty}^{t}
    \\exp\\left(\\int_\\tau^t \\frac{g_1'}{\\ell_R \\cos\\alpha_R}\\right)
    \\frac{\\tan\\alpha_R(\\tau)\\, g_1'(\\tau) - g_2'(\\tau)}{(g_1' g_2'' - g_2' g_1'')^2(\\tau)}
    \\, D(\\tau) \\, d\\tau,

where :math:`\\ell_R` and :math:`\\alpha_R` are the length and the oriented
angle of the right tangent drawn from :math:`g(\\tau)` to :math:`\\Omega_1`, and

.. math::

    D = \\det\\begin{pmatrix}
    \\tilde f' & \\tilde f'' & \\tilde f''' \\\\
    g_1' & g_1'' & g_1''' \\\\
    g_2' & g_2'' & g_2'''
    \\end{pmatrix}.

The mirrored force :math:`F_L` comes from :math:`+\\infty` with the left
tangents, the integral running over :math:`[t, \\infty)` and the exponent
being :math:`-\\int_t^\\tau g_1' / (\\ell_L \\cos\\alpha_L)`.

Both nested integrals are solved together as a two dimensional initial
value problem with :func:`scipy.integrate.solve_ivp`. The improper limit is
truncated at :math:`t \\mp 2^k`, :math:`k = 0, 1, \\dots`, and the integral is
declared converged when two successive truncations agree to the tolerance.

On the parabolic strip of :func:`locobell.lib.presets.bmo_domain` with
:math:`\\tilde f = e^t` and :math:`\\varepsilon < 1` the forces are known in closed
form: :math:`F_R(t) = -\\varepsilon^2 e^t / (1 + \\varepsilon)` and
:math:`F_L(t) = \\varepsilon^2 e^t / (1 - \\varepsilon)`.

Input
-----

Required:
  - *domain* : :class:`locobell.lib.geometry.Domain`
  - *curve* : :class:`locobell.lib.lace.LiftedCurve` over the outer boundary
  - *t* or *t_grid* : parameters of the outer boundary

Options:
  - *side* : ``'right'`` (from :math:`-\\infty`) or ``'left'`` (from :math:`+\\infty`)
  - *tol* : relative tolerance of the truncation sweep
  - *max_sweeps* : number of truncation doublings

Output
------

  - :func:`force_integral` returns the value and a convergence flag
  - :class:`ForceProfile` stores ``values``, ``converged`` and ``truncation``
    for every grid point

Example usage of :class:`ForceProfile`
--------------------------------------

::

  from locobell.lib.presets import bmo_domain, boundary_data
  from locobell.lib.force import ForceProfile

  domain = bmo_domain(epsilon=0.5)
  curve = boundary_data(domain, "exp")

  profile = ForceProfile(domain, curve, t_grid=[-1, 0, 1], side="right")
  profile.run()

Only the smallest grid point is integrated from the truncated infinity; the
others are bridged from their neighbour, so the cost of a profile is close
to that of one force integral. A grid point where the integrand is singular
is flagged in ``profile.converged`` and the profile restarts after it.

The functions and classes
-------------------------

.. autofunction:: force_integral

.. autofunction:: force_determinant

.. autoclass:: ForceProfile
    :members:

"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.integrate

from locobell.lib.base import AnalysisBase
from locobell.lib.exceptions import (
    CurvatureDegenerate, LocobellError, NoDataError, NoTangent, QuadratureFailure, SingularIntegrand
)
from locobell.lib.geometry import LEFT, RIGHT, cross, tangent

logger = logging.getLogger(__name__)

__all__ = [
    "ForceValue",
    "ForceProfile",
    "force_determinant",
    "force_integral",
    "force_profile",
    "inner_exponent",
]


@dataclass(frozen=True)
class ForceValue:
    """A force integral together with its truncation diagnostics."""

    value: float
    converged: bool
    truncation: float
    tail: float


def force_determinant(curve, t):
    """The determinant with rows (f', f'', f'''), (g1', g1'', g1''') and (g2', g2'', g2''')."""
    t = np.asarray(t, dtype=float)
    d1, d2, d3 = curve.d1(t), curve.d2(t), curve.d3(t)
    rows = [np.stack([d1[..., i], d2[..., i], d3[..., i]], axis=-1) for i in (2, 0, 1)]
    return np.einsum("...i,...i->...", rows[0], np.cross(rows[1], rows[2]))


def _check_side(side):
    if side not in (LEFT, RIGHT):
        raise ValueError("'side' must be either 'left' or 'right'")


class _ForceSystem:
    """Right-hand side of the joint initial value problem for the exponent and the force."""

    def __init__(self, domain, curve, side):
        self.domain = domain
        self.curve = curve
        self.side = side
        # the force accumulates backwards for the right side
        self.sign = -1.0 if side == RIGHT else 1.0

    def coefficients(self, tau):
        """The exponent rate and the force weight at `tau`."""
        base = self.domain.outer
        try:
            segment = tangent(self.domain, tau, self.side)
        except NoTangent as error:
            raise QuadratureFailure(f"no {self.side} tangent at {tau}: {error}")

        cosine = np.cos(segment.angle)
        if abs(cosine) < 1e-12:
            raise SingularIntegrand(f"the {self.side} tangent at {tau} is vertical")

        g1, g2 = np.asarray(base.d1(tau), dtype=float)
        curvature = float(cross(base.d1(tau), base.d2(tau)))
        if abs(curvature) < 1e-12:
            raise CurvatureDegenerate(f"g1' g2'' - g2' g1'' vanishes at {tau}")

        rate = g1 / (segment.length * cosine)
        weight = (np.tan(segment.angle) * g1 - g2) / curvature ** 2
        return rate, weight

    def __call__(self, tau, state):
        rate, weight = self.coefficients(tau)
        exponent = state[0]
        return [-rate, self.sign * np.exp(exponent) * weight * float(force_determinant(self.curve, tau))]

    def integrate(self, start, stop, state=(0.0, 0.0)):
        """Integrate from `start` to `stop` and return the final (exponent, force) state."""
        if start == stop:
            return np.asarray(state, dtype=float)

        solution = scipy.integrate.solve_ivp(
            self, (start, stop), list(state), method="DOP853", rtol=1e-7, atol=1e-9
        )
        if not solution.success:
            raise QuadratureFailure(f"integration over [{min(start, stop)}, {max(start, stop)}] failed: {solution.message}")

        end = solution.y[:, -1]
        if not np.all(np.isfinite(end)):
            raise QuadratureFailure(f"the force is not finite on [{min(start, stop)}, {max(start, stop)}]")
        return end


def force_integral(domain, curve, t, side=RIGHT, tol=1e-7, max_sweeps=12, full_output=False):
    """Evaluate the force integral at `t` by a truncation sweep.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    curve : LiftedCurve
        Boundary data over the outer boundary of `domain`.
    t : float
        Parameter of the outer boundary.
    side : {'right', 'left'}, optional
        ``'right'`` integrates from minus infinity with the right tangents,
        ``'left'`` from plus infinity with the left tangents.
    tol : float, optional
        Two successive truncations must agree to ``tol * max(1, |value|)``.
    max_sweeps : int, optional
        Number of truncations ``t -/+ 2^k``, ``k = 0, ..., max_sweeps - 1``.
        With no sweeps the value is 0 and not converged.
    full_output : bool, optional
        Return a :class:`ForceValue` instead of a tuple.

    Returns
    -------
    value : float
    converged : bool

    Raises
    ------
    SingularIntegrand
        If a tangent met during the integration is vertical.
    CurvatureDegenerate
        If the curvature numerator of the outer boundary vanishes.
    QuadratureFailure
        If a tangent cannot be found or the integration fails.

    """
    _check_side(side)
    if max_sweeps < 0:
        raise ValueError("'max_sweeps' must be greater than or equal to 0")

    curve.require_smooth()
    system = _ForceSystem(domain, curve, side)
    direction = -1.0 if side == RIGHT else 1.0

    system.coefficients(t)

    state = np.zeros(2)
    position, value, previous, tail = t, 0.0, None, np.inf
    converged = False
    for k in range(max_sweeps):
        limit = t + direction * 2.0 ** k
        state = system.integrate(position, limit, state)
        position, value = limit, float(state[1])

        if previous is not None:
            tail = abs(value - previous)
            logger.debug(f"force at {t} truncated at {limit}: {value} (change {tail})")
            if tail < tol * max(1.0, abs(value)):
                converged = True
                break
        previous = value

    if not converged and max_sweeps > 0:
        logger.warning(f"the {side} force integral at {t} did not converge within {max_sweeps} truncations")

    if full_output:
        return ForceValue(value, converged, position, tail)
    return value, converged


def inner_exponent(domain, t, tau, side=RIGHT):
    """The exponent of the damping factor of the force integrand.

    For the right side this is the integral of g1' / (l_R cos alpha_R) from
    `tau` to `t`; for the left side it is minus the integral of
    g1' / (l_L cos alpha_L) from `t` to `tau`. It vanishes at ``tau = t``.
    """
    _check_side(side)
    system = _ForceSystem(domain, None, side)
    if tau == t:
        return 0.0

    solution = scipy.integrate.solve_ivp(
        lambda s, y: [-system.coefficients(s)[0]], (t, tau), [0.0], method="DOP853", rtol=1e-9, atol=1e-12
    )
    if not solution.success:
        raise QuadratureFailure(f"integration of the exponent over [{min(t, tau)}, {max(t, tau)}] failed")
    return float(solution.y[0, -1])


class ForceProfile(AnalysisBase):
    """Force integrals over a grid of outer boundary parameters.

    The grid point closest to the truncated infinity is computed with
    :func:`force_integral`. Each following point reuses the value of its
    neighbour: for the right side

    .. math::

        F_R(t_{i+1}) = \\int_{t_i}^{t_{i+1}} e^{E(\\tau)} w(\\tau) D(\\tau) d\\tau
        + e^{E(t_i)} F_R(t_i),

    so only the bridge between neighbours needs integrating. A grid point at
    which an error occurs gets a value of ``nan`` and is flagged as not
    converged; the next point starts again from the truncated infinity.
    """

    def __init__(self, domain, curve, t_grid, side=RIGHT, tol=1e-7, max_sweeps=12, verbose=False):
        """Set up parameters for the force profile.

        Parameters
        ----------
        domain : Domain
            The annular domain.
        curve : LiftedCurve
            Smooth boundary data over the outer boundary of `domain`.
        t_grid : array_like
            Nonempty grid of outer boundary parameters.
        side : {'right', 'left'}, optional
            Which force to compute.
        tol, max_sweeps
            Passed on to :func:`force_integral`.
        verbose : bool, optional
            Show a progress bar.

        """
        _check_side(side)
        t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
        if t_grid.size == 0:
            raise ValueError("'t_grid' must not be empty")

        curve.require_smooth()

        # right forces are bridged upwards from minus infinity, left ones downwards
        order = np.argsort(t_grid, kind="stable")
        if side == LEFT:
            order = order[::-1]

        super(ForceProfile, self).__init__(t_grid[order], verbose=verbose)

        self.domain = domain
        self.curve = curve
        self.side = side
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.t_grid = t_grid
        self._order = order

        self.values = None
        self.converged = None
        self.truncation = None

    def _prepare(self):
        self._values = np.full(self.n_samples, np.nan)
        self._converged = np.zeros(self.n_samples, dtype=bool)
        self._truncation = np.full(self.n_samples, np.nan)
        self._system = _ForceSystem(self.domain, self.curve, self.side)
        self._anchor = None

    def _single_sample(self):

        t = self._sample
        i = self._sample_index

        try:
            if self._anchor is None:
                result = force_integral(
                    self.domain, self.curve, t, side=self.side, tol=self.tol,
                    max_sweeps=self.max_sweeps, full_output=True
                )
                value, converged, truncation = result.value, result.converged, result.truncation
            else:
                previous_t, previous_value, converged, truncation = self._anchor
                self._system.coefficients(t)
                exponent, bridge = self._system.integrate(t, previous_t)
                value = float(bridge + np.exp(exponent) * previous_value)

        except LocobellError as error:
            logger.info(f"force at {t} flagged: {error}")
            self._anchor = None
            return

        self._values[i] = value
        self._converged[i] = converged
        self._truncation[i] = truncation
        self._anchor = (t, value, converged, truncation)

    def _conclude(self):

        analysed = self._order[self.indices]
        self.values = np.full(len(self.t_grid), np.nan)
        self.converged = np.zeros(len(self.t_grid), dtype=bool)
        self.truncation = np.full(len(self.t_grid), np.nan)

        self.values[analysed] = self._values
        self.converged[analysed] = self._converged
        self.truncation[analysed] = self._truncation

    def to_dataframe(self):
        """The profile as a table with columns t, value, converged and truncation."""
        if self.values is None:
            raise NoDataError(".to_dataframe() is only available after calling `ForceProfile.run()`")

        return pd.DataFrame({
            "t": self.t_grid,
            "value": self.values,
            "converged": self.converged,
            "truncation": self.truncation,
        })


def force_profile(domain, curve, t_grid, side=RIGHT, **kwargs):
    """Run a :class:`ForceProfile` over `t_grid` and return it."""
    return ForceProfile(domain, curve, t_grid, side=side, **kwargs).run()

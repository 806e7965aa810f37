# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Preset domains --- :mod:`locobell.lib.presets`
================================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

This module builds the annular domains of three classical function classes,
together with the boundary data used to pose extremal problems on them.

**BMO.** The parabolic strip :math:`\\{x_1^2 \\le x_2 \\le x_1^2 + \\varepsilon^2\\}`,
built with :func:`bmo_domain`. A function :math:`\\varphi = (\\psi, \\psi^2)` has
all of its averages outside :math:`\\Omega_1` exactly when the quadratic
oscillation of :math:`\\psi` over every interval is at most :math:`\\varepsilon^2`.

**A**\\ :sub:`p1,p2`. The power domain bounded by :math:`x_2^{1/p_2} = x_1^{1/p_1}`
and :math:`Q x_2^{1/p_2} = x_1^{1/p_1}`, built with :func:`ap_domain`. A
function :math:`\\varphi = (\\psi^{p_1}, \\psi^{p_2})` is admissible when
:math:`\\langle \\psi^{p_1}\\rangle^{1/p_1} \\langle \\psi^{p_2}\\rangle^{-1/p_2} \\le Q`
over every interval. The Muckenhoupt class :math:`A_p` is
:math:`A_{1, -1/(p-1)}` (:func:`muckenhoupt_domain`) and the Gehring class is
:math:`A_{p, 1}` (:func:`gehring_domain`).

**Reverse Jensen.** The strip :math:`\\{\\Phi(x_1) \\le x_2 \\le Q\\Phi(x_1)\\}`
for a convex :math:`\\Phi`, built with :func:`reverse_jensen_domain`. With
:math:`\\Phi = \\exp` this is the exponential strip
:math:`\\{e^{x_1} \\le x_2 \\le Q e^{x_1}\\}`.

Boundary data are given as a function :math:`\\tilde f` of the parameter of
the outer boundary and are built with :func:`boundary_data`:

====================  ==========================================  ==============
name                  :math:`\\tilde f(t)`                          parameters
====================  ==========================================  ==============
``linear``            :math:`a t + b`                               a=1, b=0
``affine``            :math:`c_0 + c_1 g_1(t) + c_2 g_2(t)`         c0=0, c1=0, c2=1
``coordinate``        :math:`g_i(t)`                                i=1
``square``            :math:`a t^2`                                 a=1
``exp``               :math:`e^{\\lambda t}`                         lambda=1
``power``             :math:`s\\,t^p`                                p=3, sign=1
``abs_power``         :math:`|t|^p`                                 p=2
``sin``               :math:`a \\sin(\\omega t)`                      a=1, omega=1
``indicator``         :math:`\\chi_{|t| \\ge a}`                      a=1
====================  ==========================================  ==============

Example usage
-------------

Build the BMO strip of radius 0.5 and the exponential boundary data of the
integral John--Nirenberg inequality::

  from locobell.lib.presets import bmo_domain, boundary_data

  domain = bmo_domain(epsilon=0.5)
  curve = boundary_data(domain, "exp", **{"lambda": 1.0})

Domains can also be described by a dictionary of strings, as read from a
domain description file::

  from locobell.lib.presets import domain_from_spec

  domain = domain_from_spec({"preset": "ap", "p1": "1", "p2": "-1", "Q": "2"})

The agreement between the geometric description of each class and its
classical scalar condition can be checked on random step functions::

  from locobell.lib.presets import ClassCorrespondence

  check = ClassCorrespondence(domain, n_samples=1000, seed=0).run()
  check.agreement  # 1.0

The functions and classes
-------------------------

.. autofunction:: bmo_domain

.. autofunction:: ap_domain

.. autofunction:: muckenhoupt_domain

.. autofunction:: gehring_domain

.. autofunction:: reverse_jensen_domain

.. autofunction:: boundary_data

.. autofunction:: domain_from_spec

.. autoclass:: ClassCorrespondence
    :members:

"""
import logging

import numpy as np
import pandas as pd

from locobell.lib.base import AnalysisBase
from locobell.lib.exceptions import InvalidExponents, NoDataError, NotConvex
from locobell.lib.geometry import BoundaryCurve, ConditionReport, Domain
from locobell.lib.lace import LiftedCurve
from locobell.lib.simulate import StepFunction, membership_check

logger = logging.getLogger(__name__)

__all__ = [
    "bmo_domain",
    "ap_domain",
    "muckenhoupt_domain",
    "gehring_domain",
    "reverse_jensen_domain",
    "parabola",
    "power_curve",
    "graph_curve",
    "boundary_data",
    "BOUNDARY_DATA",
    "domain_from_spec",
    "register_custom",
    "scalar_margins",
    "ClassCorrespondence",
    "class_correspondence_check",
]


def parabola(shift=0.0, name="parabola"):
    """The curve t -> (t, t^2 + shift), bounding the set above it."""

    def eval(t):
        t = np.asarray(t, dtype=float)
        return np.stack([t, t ** 2 + shift], axis=-1)

    def d1(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.ones_like(t), 2 * t], axis=-1)

    def d2(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.zeros_like(t), np.full_like(t, 2.0)], axis=-1)

    def d3(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.zeros_like(t), np.zeros_like(t)], axis=-1)

    def level(points):
        points = np.asarray(points, dtype=float)
        return points[..., 0] ** 2 + shift - points[..., 1]

    return BoundaryCurve(eval, d1, d2, d3, level, name=name)


def power_curve(p1, p2, scale=1.0, name="power"):
    """The curve t -> (t^p1, scale t^p2) for t > 0.

    The level function is ``log(x_2 / scale) / p2 - log(x_1) / p1``, which is
    negative in the set bounded by the curve and infinite off the open
    positive quadrant.
    """

    def power(t, p, order):
        t = np.asarray(t, dtype=float)
        factor = 1.0
        for k in range(order):
            factor *= p - k
        return factor * t ** (p - order)

    def callback(order):
        def _callback(t):
            return np.stack([power(t, p1, order), scale * power(t, p2, order)], axis=-1)
        return _callback

    def level(points):
        points = np.asarray(points, dtype=float)
        x1, x2 = points[..., 0], points[..., 1]
        positive = (x1 > 0) & (x2 > 0)
        with np.errstate(all="ignore"):
            value = np.log(x2 / scale) / p2 - np.log(x1) / p1
        return np.where(positive, value, np.inf)

    return BoundaryCurve(
        callback(0), callback(1), callback(2), callback(3), level,
        param_range=(0.0, np.inf), name=name
    )


def graph_curve(phi, scale=1.0, param_range=(-np.inf, np.inf), name="graph"):
    """The graph t -> (t, scale Phi(t)) of a convex function, bounding its epigraph.

    `phi` is a sequence of four vectorised callbacks: Phi and its first three
    derivatives.
    """
    phi0, phi1, phi2, phi3 = phi
    lo, hi = param_range

    def callback(function, first):
        def _callback(t):
            t = np.asarray(t, dtype=float)
            return np.stack([np.full_like(t, first), scale * np.asarray(function(t), dtype=float)], axis=-1)
        return _callback

    def eval(t):
        t = np.asarray(t, dtype=float)
        return np.stack([t, scale * np.asarray(phi0(t), dtype=float)], axis=-1)

    def level(points):
        points = np.asarray(points, dtype=float)
        x1, x2 = points[..., 0], points[..., 1]
        inside = (x1 > lo) & (x1 < hi)
        with np.errstate(all="ignore"):
            value = scale * np.asarray(phi0(x1), dtype=float)
        return np.where(inside, value - x2, np.inf)

    return BoundaryCurve(
        eval, callback(phi1, 1.0), callback(phi2, 0.0), callback(phi3, 0.0), level,
        param_range=param_range, name=name
    )


def bmo_domain(epsilon):
    """The parabolic strip of the BMO ball of radius `epsilon`.

    Parameters
    ----------
    epsilon : float
        Radius of the ball, greater than 0.

    Returns
    -------
    domain : Domain
        Outer boundary g(t) = (t, t^2), inner boundary h(s) = (s, s^2 + epsilon^2).

    """
    if not epsilon > 0:
        raise ValueError("'epsilon' must be greater than 0")

    return Domain(
        outer=parabola(0.0, name="x2 = x1^2"),
        inner=parabola(epsilon ** 2, name="x2 = x1^2 + epsilon^2"),
        name="bmo",
        params={"epsilon": float(epsilon)},
    )


def ap_domain(p1, p2, Q):
    """The domain of the class A_{p1, p2}.

    Parameters
    ----------
    p1, p2 : float
        Nonzero exponents with ``p1 > p2``.
    Q : float
        Bound of the A_{p1, p2} "norm", at least 1. With ``Q = 1`` the two
        boundaries coincide and the domain is degenerate.

    Returns
    -------
    domain : Domain
        Outer boundary g(t) = (t^p1, t^p2) and inner boundary
        h(s) = (s^p1, Q^-p2 s^p2), both for positive parameters.

    Raises
    ------
    InvalidExponents
        If ``p1 <= p2`` or either exponent is zero.

    """
    if p1 == 0 or p2 == 0:
        raise InvalidExponents("'p1' and 'p2' must be nonzero")

    if not p1 > p2:
        raise InvalidExponents("'p1' must be greater than 'p2'")

    if not Q >= 1:
        raise ValueError("'Q' must be greater than or equal to 1")

    if Q == 1:
        logger.warning("Q = 1 makes the inner boundary coincide with the outer one")

    return Domain(
        outer=power_curve(p1, p2, name=f"(t^{p1}, t^{p2})"),
        inner=power_curve(p1, p2, scale=float(Q) ** -p2, name=f"(s^{p1}, Q^{-p2} s^{p2})"),
        name="ap",
        params={"p1": float(p1), "p2": float(p2), "Q": float(Q)},
    )


def muckenhoupt_domain(p, Q):
    """The domain of the Muckenhoupt class A_p, which is A_{1, -1/(p-1)}."""
    if not p > 1:
        raise ValueError("'p' must be greater than 1")
    return ap_domain(1.0, -1.0 / (p - 1), Q)


def gehring_domain(p, Q):
    """The domain of the Gehring class, which is A_{p, 1}."""
    if not p > 1:
        raise ValueError("'p' must be greater than 1")
    return ap_domain(p, 1.0, Q)


def _phi_exp():
    return (np.exp, np.exp, np.exp, np.exp), (-np.inf, np.inf)


def _phi_square():
    return (
        lambda t: np.asarray(t, dtype=float) ** 2,
        lambda t: 2 * np.asarray(t, dtype=float),
        lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    ), (-np.inf, np.inf)


def _phi_power(r):
    if not r > 1:
        raise ValueError("'r' must be greater than 1")
    return (
        lambda t: np.asarray(t, dtype=float) ** r,
        lambda t: r * np.asarray(t, dtype=float) ** (r - 1),
        lambda t: r * (r - 1) * np.asarray(t, dtype=float) ** (r - 2),
        lambda t: r * (r - 1) * (r - 2) * np.asarray(t, dtype=float) ** (r - 3),
    ), (0.0, np.inf)


def _check_convex(phi, curve, tol=1e-9):
    t = curve.to_param(next(curve.search_grids())[::64])
    with np.errstate(all="ignore"):
        values = np.asarray(phi[0](t), dtype=float)
        second = np.asarray(phi[2](t), dtype=float)
    finite = np.isfinite(values)
    t, values, second = t[finite], values[finite], second[finite]

    slopes = np.diff(values) / np.diff(t)
    scale = np.maximum(1.0, np.abs(slopes[:-1]))
    if np.any(np.diff(slopes) < -tol * scale) or np.any(second < -tol * np.maximum(1.0, np.abs(values))):
        raise NotConvex(f"'Phi' failed the convexity spot-check on {curve.name}")


def reverse_jensen_domain(phi, Q, param_range=None, r=2.0):
    """The domain of the reverse Jensen class of a convex function Phi.

    Parameters
    ----------
    phi : {'exp', 'square', 'power'} or sequence of callables
        A named convex function, or four vectorised callbacks (Phi and its
        first three derivatives). ``'power'`` is ``t^r`` on the positive
        half-line.
    Q : float
        Bound of the class, greater than 1.
    param_range : tuple of float, optional
        Interval on which Phi is defined. Named functions know their own.
    r : float, optional
        Exponent of ``'power'``.

    Returns
    -------
    domain : Domain
        Outer boundary the graph of Phi, inner boundary the graph of Q Phi.

    Raises
    ------
    NotConvex
        If Phi fails a sampled convexity check.

    """
    if not Q > 1:
        raise ValueError("'Q' must be greater than 1")

    named = {"exp": _phi_exp, "square": _phi_square, "power": lambda: _phi_power(r)}
    if isinstance(phi, str):
        if phi not in named:
            raise ValueError(f"'phi' must be one of {sorted(named)} or a sequence of callbacks")
        name = phi
        callbacks, default_range = named[phi]()
    else:
        name = "custom"
        callbacks, default_range = tuple(phi), (-np.inf, np.inf)

    param_range = default_range if param_range is None else param_range

    outer = graph_curve(callbacks, 1.0, param_range, name=f"x2 = Phi(x1) [{name}]")
    _check_convex(callbacks, outer)

    params = {"phi": name, "Q": float(Q), "Phi": callbacks[0]}
    if name == "power":
        params["r"] = float(r)

    return Domain(
        outer=outer,
        inner=graph_curve(callbacks, float(Q), param_range, name=f"x2 = Q Phi(x1) [{name}]"),
        name="reverse_jensen",
        params=params,
    )


def _zeros(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _linear(domain, a=1.0, b=0.0):
    return dict(
        f_tilde=lambda t: a * np.asarray(t, dtype=float) + b,
        f_tilde_d1=lambda t: np.full_like(np.asarray(t, dtype=float), a),
        f_tilde_d2=_zeros,
        f_tilde_d3=_zeros,
    )


def _affine(domain, c0=0.0, c1=0.0, c2=1.0):
    outer = domain.outer

    def combine(callback, constant):
        def _combine(t):
            values = np.asarray(callback(t), dtype=float)
            return constant + c1 * values[..., 0] + c2 * values[..., 1]
        return _combine

    return dict(
        f_tilde=combine(outer.eval, c0),
        f_tilde_d1=combine(outer.d1, 0.0),
        f_tilde_d2=combine(outer.d2, 0.0),
        f_tilde_d3=combine(outer.d3, 0.0),
    )


def _coordinate(domain, i=1):
    i = int(i)
    if i not in (1, 2):
        raise ValueError("'i' must be 1 or 2")
    return _affine(domain, 0.0, float(i == 1), float(i == 2))


def _square(domain, a=1.0):
    return dict(
        f_tilde=lambda t: a * np.asarray(t, dtype=float) ** 2,
        f_tilde_d1=lambda t: 2 * a * np.asarray(t, dtype=float),
        f_tilde_d2=lambda t: np.full_like(np.asarray(t, dtype=float), 2 * a),
        f_tilde_d3=_zeros,
        lower_bound=0.0 if a >= 0 else None,
    )


def _exp(domain, **params):
    rate = float(params.pop("lambda", 1.0))
    if params:
        raise ValueError(f"unknown parameters {sorted(params)} for 'exp'")

    def derivative(order):
        return lambda t: rate ** order * np.exp(rate * np.asarray(t, dtype=float))

    return dict(
        f_tilde=derivative(0),
        f_tilde_d1=derivative(1),
        f_tilde_d2=derivative(2),
        f_tilde_d3=derivative(3),
        lower_bound=0.0,
    )


def _power(domain, p=3.0, sign=1.0):
    def derivative(order):
        factor = sign
        for k in range(order):
            factor *= p - k
        return lambda t: factor * np.asarray(t, dtype=float) ** (p - order)

    even = float(p).is_integer() and int(p) % 2 == 0
    return dict(
        f_tilde=derivative(0),
        f_tilde_d1=derivative(1),
        f_tilde_d2=derivative(2),
        f_tilde_d3=derivative(3),
        lower_bound=0.0 if even and sign > 0 else None,
    )


def _abs_power(domain, p=2.0):
    if not p > 0:
        raise ValueError("'p' must be greater than 0")

    def derivative(order):
        factor = 1.0
        for k in range(order):
            factor *= p - k

        def _derivative(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                value = factor * np.abs(t) ** (p - order) * np.sign(t) ** order
            return np.where(np.isfinite(value), value, 0.0)
        return _derivative

    smooth = p > 3 or (float(p).is_integer() and int(p) % 2 == 0)
    return dict(
        f_tilde=derivative(0),
        f_tilde_d1=derivative(1),
        f_tilde_d2=derivative(2),
        f_tilde_d3=derivative(3),
        lower_bound=0.0,
        smooth=smooth,
    )


def _sin(domain, a=1.0, omega=1.0):
    return dict(
        f_tilde=lambda t: a * np.sin(omega * np.asarray(t, dtype=float)),
        f_tilde_d1=lambda t: a * omega * np.cos(omega * np.asarray(t, dtype=float)),
        f_tilde_d2=lambda t: -a * omega ** 2 * np.sin(omega * np.asarray(t, dtype=float)),
        f_tilde_d3=lambda t: -a * omega ** 3 * np.cos(omega * np.asarray(t, dtype=float)),
        lower_bound=-abs(a),
    )


def _indicator(domain, a=1.0):
    return dict(
        f_tilde=lambda t: (np.abs(np.asarray(t, dtype=float)) >= a).astype(float),
        f_tilde_d1=_zeros,
        f_tilde_d2=_zeros,
        f_tilde_d3=_zeros,
        lower_bound=0.0,
        smooth=False,
    )


BOUNDARY_DATA = {
    "linear": _linear,
    "affine": _affine,
    "coordinate": _coordinate,
    "square": _square,
    "exp": _exp,
    "power": _power,
    "abs_power": _abs_power,
    "sin": _sin,
    "indicator": _indicator,
}


def boundary_data(domain, name, **params):
    """Lift the outer boundary of `domain` with named boundary data.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    name : str
        One of the names in :data:`BOUNDARY_DATA`.
    **params
        Parameters of the boundary data. Values given as strings are
        converted to floats.

    Returns
    -------
    curve : LiftedCurve

    """
    if name not in BOUNDARY_DATA:
        raise ValueError(f"'name' must be one of {sorted(BOUNDARY_DATA)}")

    params = {key: float(value) for key, value in params.items()}
    options = BOUNDARY_DATA[name](domain, **params)

    label = " ".join([name] + [f"{key}={value:g}" for key, value in params.items()])
    return LiftedCurve(base=domain.outer, name=label, **options)


_CUSTOM_DOMAINS = {}


def register_custom(name, factory):
    """Register a callable returning a :class:`Domain` under `name`.

    Registered domains are available to :func:`domain_from_spec` and to
    domain description files as ``preset=custom name=<name>``.
    """
    _CUSTOM_DOMAINS[name] = factory


def _floats(spec, *keys, **defaults):
    values = []
    for key in keys:
        if key in spec:
            raw = spec[key]
        elif key in defaults:
            raw = defaults[key]
        else:
            raise ValueError(f"'{key}' is required by the '{spec['preset']}' preset")
        try:
            values.append(float(raw))
        except (TypeError, ValueError):
            raise ValueError(f"'{key}' must be a number, got '{raw}'")
    return values


def domain_from_spec(spec):
    """Build a domain from a dictionary of key-value pairs.

    The key ``preset`` selects the domain: ``bmo`` (epsilon), ``ap`` (p1, p2,
    Q), ``muckenhoupt`` (p, Q), ``gehring`` (p, Q), ``reverse_jensen`` (phi, Q,
    and r for ``phi=power``) or ``custom`` (name, plus any parameters
    accepted by the registered factory).
    """
    spec = dict(spec)
    preset = spec.get("preset")

    if preset == "bmo":
        epsilon, = _floats(spec, "epsilon")
        return bmo_domain(epsilon)
    elif preset == "ap":
        return ap_domain(*_floats(spec, "p1", "p2", "Q"))
    elif preset == "muckenhoupt":
        return muckenhoupt_domain(*_floats(spec, "p", "Q"))
    elif preset == "gehring":
        return gehring_domain(*_floats(spec, "p", "Q"))
    elif preset == "reverse_jensen":
        Q, r = _floats(spec, "Q", "r", r=2.0)
        return reverse_jensen_domain(spec.get("phi", "exp"), Q, r=r)
    elif preset == "custom":
        name = spec.pop("name", None)
        if name not in _CUSTOM_DOMAINS:
            raise ValueError(f"no custom domain registered under the name '{name}'")
        spec.pop("preset")
        return _CUSTOM_DOMAINS[name](**spec)

    raise ValueError(
        "'preset' must be one of 'bmo', 'ap', 'muckenhoupt', 'gehring', 'reverse_jensen' or 'custom'"
    )


def scalar_margins(domain, phi, ends):
    """Margins of the classical scalar condition of a class over all subintervals.

    The condition is evaluated from the scalar function psi given by the
    parameters of the pieces of `phi`, never from the points of the outer
    boundary: the quadratic oscillation of psi for BMO, the A_{p1, p2}
    ratio of psi, or the reverse Jensen inequality for Phi(psi).

    Parameters
    ----------
    domain : Domain
        A ``bmo``, ``ap`` or ``reverse_jensen`` preset.
    phi : StepFunction
        A step function valued on the outer boundary.
    ends : numpy.ndarray
        Sorted subinterval end points.

    Returns
    -------
    margins : numpy.ndarray
        One margin per pair of end points, in the order of
        :meth:`StepFunction.subinterval_pairs`; nonnegative margins satisfy
        the condition.

    """
    psi = np.asarray(phi.params, dtype=float)
    lo, hi = phi.subinterval_pairs(ends)
    params = domain.params

    if domain.name == "bmo":
        mean = phi.average_of(psi, lo, hi)
        mean_square = phi.average_of(psi ** 2, lo, hi)
        return params["epsilon"] ** 2 - (mean_square - mean ** 2)

    elif domain.name == "ap":
        p1, p2, Q = params["p1"], params["p2"], params["Q"]
        first = phi.average_of(psi ** p1, lo, hi)
        second = phi.average_of(psi ** p2, lo, hi)
        return np.log(Q) - (np.log(first) / p1 - np.log(second) / p2)

    elif domain.name == "reverse_jensen":
        Phi, Q = params["Phi"], params["Q"]
        mean = phi.average_of(psi, lo, hi)
        mean_phi = phi.average_of(np.asarray(Phi(psi), dtype=float), lo, hi)
        return Q * np.asarray(Phi(mean), dtype=float) - mean_phi

    raise ValueError("'domain' must be a 'bmo', 'ap' or 'reverse_jensen' preset")


class ClassCorrespondence(AnalysisBase):
    """Compare geometric and scalar class membership of random step functions.

    Each sample is a random step function on [0, 1] valued on the outer
    boundary. It is a member of the geometric class when none of its
    averages over the scanned subintervals lies inside Omega_1, and a member
    of the classical class when its scalar condition holds over the same
    subintervals. Samples whose scalar margin is within `tie` of zero are
    excluded from the agreement rate.
    """

    def __init__(self, domain, n_samples=1000, max_pieces=6, window_grid=16, spread=None,
                 tie=1e-9, seed=0, verbose=False):
        """Set up parameters for the class correspondence check.

        Parameters
        ----------
        domain : Domain
            A ``bmo``, ``ap`` or ``reverse_jensen`` preset.
        n_samples : int, optional
            Number of random step functions.
        max_pieces : int, optional
            Largest number of pieces of a step function.
        window_grid : int, optional
            Uniform grid added to the breakpoints of each step function to
            form the subintervals that are scanned.
        spread : float, optional
            Largest standard deviation of the search coordinates of the piece
            values. The default is epsilon for BMO and 1 otherwise.
        tie : float, optional
            Margins within this distance of zero count as ties.
        seed : int, optional
            Seed of the random number generator.
        verbose : bool, optional
            Show a progress bar.

        """
        if domain.name not in ("bmo", "ap", "reverse_jensen"):
            raise ValueError("'domain' must be a 'bmo', 'ap' or 'reverse_jensen' preset")

        if n_samples < 1:
            raise ValueError("'n_samples' must be a positive integer")

        if max_pieces < 1:
            raise ValueError("'max_pieces' must be a positive integer")

        rng = np.random.default_rng(seed)
        if spread is None:
            spread = domain.params.get("epsilon", 1.0)

        samples = []
        for _ in range(n_samples):
            pieces = rng.integers(1, max_pieces + 1)
            breakpoints = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, pieces - 1)), [1.0]])
            sigma = rng.uniform(0.1, 2.0) * spread
            z = rng.normal(0.0, sigma, pieces)
            samples.append(StepFunction(breakpoints, domain.outer.to_param(z), domain.outer))

        super(ClassCorrespondence, self).__init__(samples, verbose=verbose)

        self.domain = domain
        self.window_grid = window_grid
        self.tie = tie
        self.results = None

    def _prepare(self):
        self._rows = []

    def _single_sample(self):

        phi = self._sample
        ends = phi.scan_ends(self.window_grid)

        _, geometric = membership_check(self.domain, phi, window_grid=self.window_grid)
        scalar = float(np.min(scalar_margins(self.domain, phi, ends)))

        self._rows.append([
            self.indices[self._sample_index],
            len(phi.params),
            geometric,
            scalar,
            geometric >= -self.domain.tol,
            scalar >= 0,
            abs(scalar) < self.tie,
        ])

    def _conclude(self):

        self.results = pd.DataFrame(
            self._rows,
            columns=["sample", "pieces", "geometric_margin", "scalar_margin", "geometric", "scalar", "tie"],
        )
        self.results["agree"] = self.results["geometric"] == self.results["scalar"]

    @property
    def agreement(self):
        """Fraction of the samples, ties excluded, on which both tests agree."""
        if self.results is None:
            raise NoDataError(".agreement is only available after calling `ClassCorrespondence.run()`")

        counted = self.results.loc[~self.results["tie"], "agree"]
        return float(counted.mean()) if len(counted) else 1.0


def class_correspondence_check(domain, samples=1000, seed=0, **kwargs):
    """Run :class:`ClassCorrespondence` and summarise it as a report.

    The verdict is ``'pass'`` when geometric and scalar membership agree on
    every sample that is not a tie.
    """
    check = ClassCorrespondence(domain, n_samples=samples, seed=seed, **kwargs).run()
    verdict = "pass" if check.agreement == 1.0 else "fail"
    return ConditionReport(
        "class correspondence", verdict, check.results,
        {"agreement": check.agreement, "ties": int(check.results["tie"].sum())}
    )

# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Exceptions --- :mod:`locobell.lib.exceptions`
===============================================

All errors raised by :mod:`locobell` derive from :class:`LocobellError`, so a
caller can catch every numerical failure of the library with a single
``except`` clause. Errors that signal bad input parameters additionally derive
from :class:`ValueError`.

"""

__all__ = [
    "LocobellError",
    "NoDataError",
    "NoTangent",
    "QuadratureFailure",
    "TooManyChanges",
    "ContinuationStall",
    "ChordExitsDomain",
    "SingularIntegrand",
    "CurvatureDegenerate",
    "EmptyMesh",
    "NotConverged",
    "StuckPoint",
    "NoCandidate",
    "InvalidExponents",
    "NotConvex",
]


class LocobellError(Exception):
    """Base class of all locobell errors."""


class NoDataError(LocobellError, AttributeError):
    """Results were requested before the analysis was run."""


class NoTangent(LocobellError):
    """No tangent segment from a point of the outer boundary to the inner set."""


class QuadratureFailure(LocobellError):
    """A partial integral could not be evaluated inside its window."""


class TooManyChanges(LocobellError):
    """The torsion of a lifted curve changes sign more often than allowed."""


class ContinuationStall(LocobellError):
    """The cup-chord continuation failed to make progress."""


class ChordExitsDomain(LocobellError):
    """A solved chord leaves the annular domain."""


class SingularIntegrand(LocobellError):
    """The force integrand is singular (the tangent is vertical)."""


class CurvatureDegenerate(LocobellError):
    """The curvature numerator of the outer boundary vanishes."""


class EmptyMesh(LocobellError):
    """The requested window does not meet the annular domain."""


class NotConverged(LocobellError):
    """The majorant sweep did not converge.

    The last field computed is available as the attribute ``field``.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class StuckPoint(LocobellError):
    """A point of the domain could not be split any further."""


class NoCandidate(LocobellError):
    """Every candidate step function failed the membership check."""


class InvalidExponents(LocobellError, ValueError):
    """The exponents of an A_{p1, p2} domain are not admissible."""


class NotConvex(LocobellError, ValueError):
    """A function that must be convex failed the convexity spot-check."""

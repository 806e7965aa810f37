"""
Simple systems created for testing locobell
===========================================

"""
__all__ = [
    "circle",
    "concentric_disks",
    "parabola_with_disk",
    "rotated_bmo",
]

import numpy as np

from locobell.lib.geometry import BoundaryCurve, Domain
from locobell.lib.presets import bmo_domain, parabola


def circle(radius, center=(0.0, 0.0), name="circle"):
    """The circle of `radius` around `center`, traversed counter-clockwise for t in [-pi, pi)."""
    center = np.asarray(center, dtype=float)

    def eval(t):
        t = np.asarray(t, dtype=float)
        return center + radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def d1(t):
        t = np.asarray(t, dtype=float)
        return radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def d2(t):
        t = np.asarray(t, dtype=float)
        return -radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def d3(t):
        t = np.asarray(t, dtype=float)
        return radius * np.stack([np.sin(t), -np.cos(t)], axis=-1)

    def level(points):
        points = np.asarray(points, dtype=float) - center
        return np.sum(points ** 2, axis=-1) - radius ** 2

    return BoundaryCurve(eval, d1, d2, d3, level, param_range=(-np.pi, np.pi), periodic=True, name=name)


# Disks of radii 2 and 1 around the origin.
# The tangent from g(u) touches the inner circle at u -/+ pi/3, with length sqrt(3).
def concentric_disks(outer=2.0, inner=1.0):
    return Domain(
        outer=circle(outer, name=f"|x| = {outer:g}"),
        inner=circle(inner, name=f"|x| = {inner:g}"),
        name="disks",
        params={"outer": outer, "inner": inner},
    )


# The set above x2 = x1^2 minus the disk of radius 0.5 around (0, 2).
# Omega_0 is unbounded but Omega_1 is not.
def parabola_with_disk(radius=0.5, center=(0.0, 2.0)):
    return Domain(
        outer=parabola(0.0, name="x2 = x1^2"),
        inner=circle(radius, center=center, name="disk"),
        name="parabola with disk",
        params={"radius": radius, "center": tuple(center)},
    )


# The BMO strip rotated about the origin and shifted
def rotated_bmo(epsilon=0.5, angle=np.pi / 6, shift=(1.0, -0.5)):
    return bmo_domain(epsilon).transformed(angle=angle, shift=shift)

# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Reports --- :mod:`locobell.lib.reports`
=========================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

CSV tables and static SVG figures for the results of the other modules.

Tables are written with a header row and without the index. Figures are
written as SVG 1.1 without a creation date and with a fixed hash salt, so
that identical results produce identical files.

Example usage
-------------

::

  from locobell.lib.reports import write_csv, plot_field

  write_csv(field.to_dataframe(), "field.csv")
  plot_field(field, "field.svg")

The functions
-------------

.. autofunction:: write_csv

.. autofunction:: plot_domain

.. autofunction:: plot_field

.. autofunction:: plot_chords

"""
import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

logger = logging.getLogger(__name__)

matplotlib.rcParams.update({"font.size": 10, "svg.hashsalt": "locobell", "svg.fonttype": "none"})

__all__ = [
    "write_csv",
    "save_svg",
    "boundary_points",
    "plot_domain",
    "plot_field",
    "plot_chords",
]


def write_csv(frame, path):
    """Write a table with a header row and no index."""
    frame.to_csv(path, index=False)
    logger.info(f"wrote {len(frame)} rows to {path}")
    return path


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"wrote {path}")
    return path


def boundary_points(curve, box=None, samples=2001):
    """Points of a boundary curve, restricted to `box` when one is given."""
    z = list(curve.search_grids())[-1]
    z = np.linspace(z[0], z[-1], samples)
    with np.errstate(all="ignore"):
        points = np.asarray(curve.eval(curve.to_param(z)), dtype=float)
    points[~np.all(np.isfinite(points), axis=-1)] = np.nan

    if box is not None:
        box = np.asarray(box, dtype=float)
        margin = 0.05 * (box[:, 1] - box[:, 0])
        outside = np.any((points < box[:, 0] - margin) | (points > box[:, 1] + margin), axis=-1)
        points[outside] = np.nan
    return points


def _draw_domain(ax, domain, box):
    outer = boundary_points(domain.outer, box)
    inner = boundary_points(domain.inner, box)
    ax.plot(outer[:, 0], outer[:, 1], color="k", lw=1.2, label=r"$\partial\Omega_0$")
    ax.plot(inner[:, 0], inner[:, 1], color="tab:red", lw=1.2, label=r"$\partial\Omega_1$")

    if box is not None:
        ax.set_xlim(*box[0])
        ax.set_ylim(*box[1])

    ax.set_xlabel(r"$x_1$")
    ax.set_ylabel(r"$x_2$")


def plot_domain(domain, path, box=None, tangents=()):
    """Draw both boundaries of `domain` and a sample of tangent segments.

    Parameters
    ----------
    domain : Domain
        The annular domain.
    path : str
        Output file.
    box : array_like, optional
        Axis limits ``((x1_min, x1_max), (x2_min, x2_max))``.
    tangents : iterable of Tangent, optional
        Tangent segments drawn from their source to their touching point.

    """
    fig, ax = plt.subplots(figsize=(5, 4))
    _draw_domain(ax, domain, None if box is None else np.asarray(box, dtype=float))

    for tangent in tangents:
        colour = "tab:blue" if tangent.side == "left" else "tab:green"
        source, touch = np.asarray(tangent.source), np.asarray(tangent.touch)
        ax.plot([source[0], touch[0]], [source[1], touch[1]], color=colour, lw=0.6, alpha=0.7)

    ax.set_title(domain.name)
    ax.legend(loc="best", fontsize=8)
    return save_svg(fig, path)


def plot_field(field, path, domain=None):
    """Heat map of a majorant field at the mesh nodes.

    Nodes pinned at the ceiling are drawn as crosses.
    """
    mesh = field.mesh
    fig, ax = plt.subplots(figsize=(5, 4))

    if domain is not None:
        _draw_domain(ax, domain, mesh.box)

    finite = ~field.pinned
    scatter = ax.scatter(
        mesh.nodes[finite, 0], mesh.nodes[finite, 1], c=field.values[finite],
        s=6, marker="s", cmap="viridis", linewidths=0,
    )
    if field.pinned.any():
        ax.scatter(mesh.nodes[~finite, 0], mesh.nodes[~finite, 1], s=8, marker="x", color="k", lw=0.5)

    fig.colorbar(scatter, ax=ax, label="majorant")
    ax.set_xlim(*mesh.box[0])
    ax.set_ylim(*mesh.box[1])
    ax.set_xlabel(r"$x_1$")
    ax.set_ylabel(r"$x_2$")
    ax.set_title(f"resolution {mesh.resolution:g}")
    return save_svg(fig, path)


def plot_chords(domain, chords, path, box=None):
    """Overlay chords ``(a, b)`` of the outer boundary on the domain."""
    fig, ax = plt.subplots(figsize=(5, 4))
    _draw_domain(ax, domain, None if box is None else np.asarray(box, dtype=float))

    for chord in chords:
        ends = np.asarray(domain.outer.eval(np.array([chord.a, chord.b])), dtype=float)
        ax.plot(ends[:, 0], ends[:, 1], color="tab:purple", lw=0.5, alpha=0.8)

    ax.set_title(f"{len(chords)} chords")
    ax.legend(loc="best", fontsize=8)
    return save_svg(fig, path)

# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""Command-line interface --- :mod:`locobell.cli`
================================================

:Author: locobell developers
:Year: 2026
:Copyright: GNU Public License v2

The ``locobell`` command has four subcommands:

  - ``diagnose`` checks that a domain is admissible and that the force
    integrals converge, and writes ``verdicts.csv`` and ``domain.svg``
  - ``solve`` computes the minimal locally concave majorant on a mesh, and
    writes ``field.csv``, ``nodes.csv``, ``edges.csv``, ``convergence.csv``
    and ``field.svg``
  - ``gap`` compares the majorant with simulated lower bounds at a set of
    points, and writes ``gap.csv``
  - ``cups`` locates the torsion sign changes of the lifted boundary and
    follows the cup chords, and writes ``chords.csv`` and ``chords.svg``

The domain is given either by a preset with its parameters::

  locobell solve --preset bmo --epsilon 0.5 --f exp --resolution 0.1

or by a key-value file::

  # strip.txt
  preset=reverse_jensen phi=exp Q=2

  locobell diagnose --domain-file strip.txt --f "exp lambda=0.5"

Tolerances and budgets may be read from a ``--config`` file in the same
key-value format (keys ``tolerance``, ``max_iters``, ``samples``,
``budget``, ``seed``, ``resolution``, ``mode`` and ``directions``). Flags
given on the command line take precedence.

Exit codes are 0 when every verdict passes, 1 for inconclusive verdicts or
an unconverged computation, 2 for a hard failure and 64 for a usage error.

"""
import argparse
import logging
import pathlib
import sys

import numpy as np
import pandas as pd

import locobell
from locobell.lib import reports
from locobell.lib.concavify import build_mesh, local_concavity_violation, minimal_concave_majorant
from locobell.lib.exceptions import EmptyMesh, InvalidExponents, LocobellError, NotConvex, NoTangent, TooManyChanges
from locobell.lib.force import force_integral
from locobell.lib.geometry import (
    LEFT, RIGHT, check_derivatives, check_divergence_condition, check_ray_condition, check_unboundedness, tangent,
)
from locobell.lib.lace import chord_differential_inequalities, solve_cup_chords, torsion_sign_changes
from locobell.lib.presets import boundary_data, domain_from_spec
from locobell.lib.simulate import DualityGap

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_INCONCLUSIVE, EXIT_FAIL, EXIT_USAGE = 0, 1, 2, 64

DEFAULTS = {
    "tolerance": 1e-9,
    "max_iters": 10000,
    "samples": 64,
    "budget": 100,
    "seed": 0,
    "resolution": 0.1,
    "mode": "gauss-seidel",
    "directions": 72,
}

_TYPES = {
    "tolerance": float,
    "max_iters": int,
    "samples": int,
    "budget": int,
    "seed": int,
    "resolution": float,
    "mode": str,
    "directions": int,
}


class UsageError(Exception):
    """Malformed input on the command line or in an input file."""


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_key_values(text):
    """Parse whitespace or newline separated ``key=value`` pairs; ``#`` starts a comment."""
    pairs = {}
    for line in text.splitlines():
        for token in line.split("#", 1)[0].split():
            key, sep, value = token.partition("=")
            if not sep or not key or not value:
                raise UsageError(f"expected 'key=value', got '{token}'")
            pairs[key] = value
    return pairs


def read_key_values(path):
    try:
        text = pathlib.Path(path).read_text()
    except OSError as error:
        raise UsageError(f"cannot read '{path}': {error.strerror}")
    return parse_key_values(text)


def parse_boundary_data(text):
    """Split ``"name k=v ..."`` into a name and its parameters."""
    tokens = text.split()
    if not tokens:
        raise UsageError("'--f' must name the boundary data")
    return tokens[0], parse_key_values(" ".join(tokens[1:]))


def parse_window(text):
    """Parse ``lo,hi`` as a parameter interval or ``x1lo,x1hi,x2lo,x2hi`` as a box."""
    try:
        values = [float(value) for value in text.replace(" ", "").split(",")]
    except ValueError:
        raise UsageError(f"'--window' must be comma separated numbers, got '{text}'")
    if len(values) == 2:
        return tuple(values)
    if len(values) == 4:
        return (tuple(values[:2]), tuple(values[2:]))
    raise UsageError("'--window' must have 2 or 4 values")


def parse_points(text):
    """Parse ``x1,x2;x1,x2;...`` into an array of points."""
    try:
        points = [[float(value) for value in pair.split(",")] for pair in text.split(";") if pair.strip()]
    except ValueError:
        raise UsageError(f"'--points' must be ';' separated pairs 'x1,x2', got '{text}'")
    if not points or any(len(point) != 2 for point in points):
        raise UsageError("'--points' must be ';' separated pairs 'x1,x2'")
    return np.asarray(points, dtype=float)


def settings_from(args):
    """Defaults, overridden by the ``--config`` file, overridden by flags."""
    settings = dict(DEFAULTS)
    if args.config is not None:
        config = read_key_values(args.config)
        unknown = sorted(set(config) - set(DEFAULTS))
        if unknown:
            raise UsageError(f"unknown configuration keys: {', '.join(unknown)}")
        settings.update(config)

    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value

    try:
        settings = {key: _TYPES[key](value) for key, value in settings.items()}
    except ValueError as error:
        raise UsageError(f"invalid configuration value: {error}")

    if settings["resolution"] <= 0:
        raise UsageError("'resolution' must be greater than 0")
    if settings["mode"] not in ("gauss-seidel", "jacobi"):
        raise UsageError("'mode' must be either 'gauss-seidel' or 'jacobi'")
    return settings


def domain_from_args(args):
    if args.domain_file is not None:
        spec = read_key_values(args.domain_file)
        if "preset" not in spec:
            raise UsageError(f"'{args.domain_file}' must set 'preset'")
    else:
        spec = {"preset": args.preset}
        for key in ("epsilon", "p1", "p2", "p", "Q", "phi", "r"):
            value = getattr(args, key)
            if value is not None:
                spec[key] = value

    try:
        return domain_from_spec(spec)
    except (InvalidExponents, NotConvex):
        raise
    except ValueError as error:
        raise UsageError(str(error))


def curve_from_args(args, domain):
    name, params = parse_boundary_data(args.f)
    try:
        return boundary_data(domain, name, **params)
    except (TypeError, ValueError) as error:
        raise UsageError(f"invalid boundary data '{args.f}': {error}")


def default_window(domain):
    """Outer boundary parameters whose search coordinates span [-2, 2]."""
    return tuple(float(t) for t in domain.outer.to_param(np.array([-2.0, 2.0])))


def param_window(args, domain):
    window = default_window(domain) if args.window is None else args.window
    if np.ndim(window) != 1:
        raise UsageError("this command needs a parameter interval '--window lo,hi'")
    return window


def output_dir(args):
    path = pathlib.Path(args.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _verdict_code(verdicts):
    if any(verdict in ("fail", "bounded") for verdict in verdicts):
        return EXIT_FAIL
    if any(verdict == "inconclusive" for verdict in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def cmd_diagnose(args):
    """Run every admissibility diagnostic and the force integral probes."""
    settings = settings_from(args)
    domain = domain_from_args(args)
    curve = curve_from_args(args, domain)
    window = param_window(args, domain)
    out = output_dir(args)

    checks = [
        check_unboundedness(domain),
        check_ray_condition(domain, directions=settings["directions"]),
        check_divergence_condition(domain, t0=float(np.mean(window))),
        check_derivatives(domain.outer, params=np.linspace(*window, 9)),
        check_derivatives(domain.inner),
    ]
    rows = [
        [report.condition, report.verdict, "; ".join(f"{k}={v}" for k, v in report.details.items())]
        for report in checks
    ]

    if curve.smooth:
        try:
            changes = torsion_sign_changes(curve, window)
            cups = sum(change.cup for change in changes)
            rows.append(["torsion", "pass", f"changes={len(changes)}; cups={cups}"])
        except TooManyChanges as error:
            rows.append(["torsion", "inconclusive", str(error)])

        for side in (RIGHT, LEFT):
            t = window[0] if side == RIGHT else window[1]
            try:
                force = force_integral(domain, curve, t, side=side, tol=1e-7, full_output=True)
                verdict = "pass" if force.converged else "inconclusive"
                detail = f"t={t:g}; value={force.value:.10g}; tail={force.tail:.3g}"
            except LocobellError as error:
                verdict, detail = "inconclusive", f"t={t:g}; {type(error).__name__}: {error}"
            rows.append([f"force {side}", verdict, detail])
    else:
        rows.append(["torsion", "inconclusive", f"'{curve.name}' is not smooth"])

    table = pd.DataFrame(rows, columns=["condition", "verdict", "details"])
    reports.write_csv(table, out / "verdicts.csv")

    tangents = []
    for u in np.linspace(*window, 9):
        for side in (LEFT, RIGHT):
            try:
                tangents.append(tangent(domain, u, side))
            except NoTangent:
                continue
    reports.plot_domain(domain, out / "domain.svg", tangents=tangents)

    for condition, verdict, _ in rows:
        print(f"{condition:<20} {verdict}")
    return _verdict_code(table["verdict"])


def _solve(args, settings, domain, curve):
    window = default_window(domain) if args.window is None else args.window
    mesh = build_mesh(domain, window, settings["resolution"], samples=settings["samples"], log_window=args.log_window)
    field = minimal_concave_majorant(
        mesh, curve, max_iters=settings["max_iters"], tolerance=settings["tolerance"], mode=settings["mode"],
    )
    return field


def cmd_solve(args):
    """Compute the majorant on a mesh and write the field."""
    settings = settings_from(args)
    domain = domain_from_args(args)
    curve = curve_from_args(args, domain)
    out = output_dir(args)

    field = _solve(args, settings, domain, curve)

    nodes, edges = field.mesh.to_dataframes()
    reports.write_csv(field.to_dataframe(), out / "field.csv")
    reports.write_csv(nodes, out / "nodes.csv")
    reports.write_csv(edges, out / "edges.csv")
    reports.write_csv(field.convergence_dataframe(), out / "convergence.csv")
    reports.plot_field(field, out / "field.svg", domain=domain)

    print(f"nodes {field.mesh.n_nodes}, runs {len(field.mesh.runs)}, sweeps {field.iterations}")
    print(f"converged {field.converged}, concavity violation {local_concavity_violation(field):.3g}")
    print(f"data residual {field.data_residual(curve):.3g}")
    return EXIT_PASS if field.converged else EXIT_INCONCLUSIVE


def default_points(domain, box):
    """Up to nine points of the domain on a 3 x 3 grid inside the window."""
    box = np.asarray(box, dtype=float)
    fractions = np.array([0.25, 0.5, 0.75])
    x1 = box[0, 0] + fractions * (box[0, 1] - box[0, 0])
    x2 = box[1, 0] + fractions * (box[1, 1] - box[1, 0])
    points = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1).reshape(-1, 2)
    return points[domain.contains(points)]


def cmd_gap(args):
    """Compare the majorant with simulated lower bounds."""
    settings = settings_from(args)
    domain = domain_from_args(args)
    curve = curve_from_args(args, domain)
    out = output_dir(args)

    field = _solve(args, settings, domain, curve)

    points = default_points(domain, field.mesh.box) if args.points is None else args.points
    outside = ~domain.contains(points)
    if outside.any():
        raise UsageError(f"points outside the domain: {points[outside].tolist()}")
    if len(points) == 0:
        raise UsageError("no point of the default grid lies in the domain; use '--points'")

    gap = DualityGap(domain, curve, field, points, budget=settings["budget"], seed=settings["seed"]).run()
    table = gap.results
    summary = pd.DataFrame(
        [[np.nan, np.nan, np.nan, np.nan, table["gap"].max(), table["rel_gap"].max(), "max"]],
        columns=table.columns,
    )
    reports.write_csv(pd.concat([table, summary], ignore_index=True), out / "gap.csv")

    print(f"max gap {gap.max_gap:.3g}, max relative gap {table['rel_gap'].max():.3g}")
    return EXIT_PASS if field.converged else EXIT_INCONCLUSIVE


def cmd_cups(args):
    """Locate the cups of the lifted boundary and follow their chords."""
    settings = settings_from(args)
    domain = domain_from_args(args)
    curve = curve_from_args(args, domain)
    window = param_window(args, domain)
    out = output_dir(args)

    curve.require_smooth()
    try:
        changes = torsion_sign_changes(curve, window)
    except TooManyChanges as error:
        logger.error(str(error))
        print(f"too many torsion sign changes: {error}")
        return EXIT_INCONCLUSIVE

    rows, chords = [], []
    for change in changes:
        if not change.cup:
            continue
        try:
            family = solve_cup_chords(curve, change.location, window, domain=domain)
        except LocobellError as error:
            logger.warning(f"cup at {change.location:g}: {type(error).__name__}: {error}")
            continue
        for chord in family:
            first, second = chord_differential_inequalities(curve, chord)
            rows.append([change.location, chord.a, chord.b, chord.residual, first, second, chord.admissible()])
        chords.extend(family)

    table = pd.DataFrame(rows, columns=["cup", "a", "b", "residual", "diff_ineq_a", "diff_ineq_b", "admissible"])
    reports.write_csv(table, out / "chords.csv")
    reports.plot_chords(domain, chords, out / "chords.svg")

    cups = [change.location for change in changes if change.cup]
    print(f"cups {len(cups)}: " + ", ".join(f"{location:.6g}" for location in cups))
    print(f"chords {len(chords)}")
    return EXIT_PASS


COMMANDS = {
    "diagnose": cmd_diagnose,
    "solve": cmd_solve,
    "gap": cmd_gap,
    "cups": cmd_cups,
}


def build_parser():
    parser = ArgumentParser(prog="locobell", description="Minimal locally concave majorants on annular domains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {locobell.__version__}")

    common = ArgumentParser(add_help=False)
    domain = common.add_argument_group("domain")
    source = domain.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--preset", choices=["bmo", "ap", "muckenhoupt", "gehring", "reverse_jensen"], help="named domain",
    )
    source.add_argument("--domain-file", help="key-value file describing the domain")
    domain.add_argument("--epsilon", help="radius of the BMO ball")
    domain.add_argument("--p1", help="first exponent of the A_{p1,p2} class")
    domain.add_argument("--p2", help="second exponent of the A_{p1,p2} class")
    domain.add_argument("--p", help="exponent of the Muckenhoupt or Gehring class")
    domain.add_argument("--Q", help="bound of the class condition")
    domain.add_argument("--phi", help="convex function of the reverse Jensen class: exp, square or power")
    domain.add_argument("--r", help="exponent of phi=power")

    common.add_argument("--f", required=True, help="boundary data, for example 'exp lambda=2'")
    common.add_argument("--window", type=_typed(parse_window), help="'lo,hi' parameters or 'x1lo,x1hi,x2lo,x2hi'")
    common.add_argument("--log-window", action="store_true", help="the window box is in logarithmic coordinates")
    common.add_argument("--out-dir", default=".", help="directory for the output files")
    common.add_argument("--config", help="key-value file with tolerances and budgets")
    common.add_argument("--verbose", "-v", action="store_true", help="log progress")

    numerics = common.add_argument_group("numerics")
    numerics.add_argument("--resolution", type=float, help=f"mesh spacing (default {DEFAULTS['resolution']})")
    numerics.add_argument("--tolerance", type=float, help=f"sweep tolerance (default {DEFAULTS['tolerance']})")
    numerics.add_argument("--max-iters", type=int, help=f"largest number of sweeps (default {DEFAULTS['max_iters']})")
    numerics.add_argument("--samples", type=int, help=f"segment samples (default {DEFAULTS['samples']})")
    numerics.add_argument("--mode", choices=["gauss-seidel", "jacobi"], help="sweep order (default gauss-seidel)")
    numerics.add_argument("--budget", type=int, help=f"lower bound candidates (default {DEFAULTS['budget']})")
    numerics.add_argument("--seed", type=int, help=f"random seed (default {DEFAULTS['seed']})")
    numerics.add_argument("--directions", type=int, help=f"ray directions (default {DEFAULTS['directions']})")

    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=command.__doc__.splitlines()[0])
        if name == "gap":
            sub.add_argument("--points", type=_typed(parse_points), help="points 'x1,x2;x1,x2;...'")

    return parser


def _typed(parse):
    """Wrap a parser so argparse reports its usage errors."""
    def wrapped(text):
        try:
            return parse(text)
        except UsageError as error:
            raise argparse.ArgumentTypeError(str(error))
    wrapped.__name__ = parse.__name__
    return wrapped


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except UsageError as error:
        parser.print_usage(sys.stderr)
        print(f"locobell: error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidExponents, NotConvex, EmptyMesh) as error:
        print(f"locobell: {type(error).__name__}: {error}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as error:
        print(f"locobell: error: {error}", file=sys.stderr)
        return EXIT_FAIL
    except LocobellError as error:
        print(f"locobell: {type(error).__name__}: {error}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

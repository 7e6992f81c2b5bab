"""Command-line entry point binding the engines into reproducible batch runs.

One binary, many subcommands.  Exit codes: 0 success, 1 usage error, 2 data
error.  All numeric output is printed with 17 significant digits and every
report embeds the run configuration, so reports are byte-stable across runs.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .analytic import (DomeSpec, TubeSpec, dome_field, double_helix_pair,
                       rotating_patch_series, twisted_tube, uniform_vertical)
from .errors import WindhelError
from .fieldline import load_curves, save_curves, trace
from .flux import PlaneGrid, PlanarSeries, flux_decompose, flux_total, load_series, save_series
from .grid import Grid3, divergence_max, load_field, save_field
from .helicity import decompose, helicity_gauge_form, helicity_pairwise_form
from .regions import label_open_closed, load_mask, save_mask
from .thintube import ThinTube, arch_angles, arch_mutual_helicity, mutual_helicity_thin
from .winding import winding_general


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v):
    """17 significant digits, enough to round-trip a float64."""
    return f"{v:.17g}"


def _parse_pair(s):
    parts = [float(p) for p in s.split(",")]
    if len(parts) != 2:
        raise UsageError(f"expected 'x,y', got {s!r}")
    return tuple(parts)


def _parse_triple(s):
    parts = [float(p) for p in s.split(",")]
    if len(parts) != 3:
        raise UsageError(f"expected 'x,y,z', got {s!r}")
    return tuple(parts)


def _build_parser():
    p = _Parser(prog="windhel",
                description="Winding helicity of magnetic fields between two planes")
    p.add_argument("--version", action="version", version=f"windhel {__version__}")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file of default option values")
        sp.add_argument("--threads", type=int, default=0,
                        help="worker threads (0 = auto)")
        sp.add_argument("--deterministic", dest="deterministic", default=True,
                        action="store_true",
                        help="fixed reduction order (default; reductions are "
                             "always blocked and ordered)")
        sp.add_argument("--eps-bz", type=float, default=1e-8,
                        help="relative B_z threshold for slope/velocity definition")
        sp.add_argument("--eps-null", type=float, default=1e-10,
                        help="relative |B| threshold treated as a null")

    sp = sub.add_parser("make-field", help="generate an analytic test field (WH3D)")
    common(sp)
    sp.add_argument("--kind", required=True,
                    choices=["uniform", "tube", "helix", "dome", "dome3"])
    sp.add_argument("--out", required=True)
    sp.add_argument("--n", type=int, default=32, help="samples per axis")
    sp.add_argument("--extent", type=float, default=1.0,
                    help="half-width of the footprint [-extent, extent]^2")
    sp.add_argument("--height", type=float, default=1.0)
    sp.add_argument("--b0", type=float, default=1.0)
    sp.add_argument("--radius", type=float, default=None)
    sp.add_argument("--tau", type=float, default=None,
                    help="tube rotation rate (rad per unit height); "
                         "default one full turn over the height")
    sp.add_argument("--turns", type=float, default=1.0, help="helix rotations")
    sp.add_argument("--separation", type=float, default=0.9)
    sp.add_argument("--edge", default="area", choices=["area", "hard", "cosine"])

    sp = sub.add_parser("make-series", help="generate a rotating-patch series (WHPS)")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--phi-i", type=float, default=1.0)
    sp.add_argument("--phi-j", type=float, default=1.0)
    sp.add_argument("--separation", type=float, default=0.9)
    sp.add_argument("--omega", type=float, default=2.0 * np.pi)
    sp.add_argument("--t-final", type=float, default=1.0)
    sp.add_argument("--steps", type=int, default=32)
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--extent", type=float, default=1.0)
    sp.add_argument("--radius", type=float, default=None)

    sp = sub.add_parser("trace", help="trace field lines (WH3D -> WHCRV)")
    common(sp)
    sp.add_argument("--field", required=True)
    sp.add_argument("--seed", action="append", required=True,
                    help="seed point 'x,y,z' (repeatable)")
    sp.add_argument("--step", type=float, default=None,
                    help="arclength step (default half the smallest spacing)")
    sp.add_argument("--max-steps", type=int, default=10000)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("winding", help="generalized winding of two curves (WHCRV)")
    common(sp)
    sp.add_argument("--curves", required=True)

    sp = sub.add_parser("helicity", help="winding helicity of a field (WH3D)")
    common(sp)
    sp.add_argument("--field", required=True)
    sp.add_argument("--mask", default=None)
    sp.add_argument("--reference", default=None)
    sp.add_argument("--form", default="both", choices=["gauge", "pairwise", "both"])
    sp.add_argument("--out", default=None, help="write a JSON report here")

    sp = sub.add_parser("tube-mutual", help="thin-tube mutual helicity of two curves")
    common(sp)
    sp.add_argument("--curves", required=True)
    sp.add_argument("--flux-i", type=float, default=1.0)
    sp.add_argument("--flux-j", type=float, default=1.0)

    sp = sub.add_parser("arch-mutual", help="footpoint-angle mutual helicity of two arches")
    common(sp)
    sp.add_argument("--a-pos", required=True, help="positive footpoint of arch a: 'x,y'")
    sp.add_argument("--a-neg", required=True)
    sp.add_argument("--b-pos", required=True)
    sp.add_argument("--b-neg", required=True)
    sp.add_argument("--flux-i", type=float, default=1.0)
    sp.add_argument("--flux-j", type=float, default=1.0)

    sp = sub.add_parser("flux", help="time-integrated helicity flux (WHPS)")
    common(sp)
    sp.add_argument("--series", required=True)
    sp.add_argument("--labels", default=None,
                    help="per-time label stack: a WHMSK whose nz is the time count")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("label", help="open/closed volume labelling (WH3D -> WHMSK)")
    common(sp)
    sp.add_argument("--field", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seeds-per-cell", type=int, default=1)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--max-steps", type=int, default=20000)
    return p


def _apply_config(args, argv):
    """Fill option values from a config file: flags > config file > defaults."""
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            defaults = json.load(fh)
        given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and f"--{key}" not in given \
                    and f"--{attr.replace('_', '-')}" not in given:
                setattr(args, attr, value)
    for tol in ("eps_bz", "eps_null"):
        if getattr(args, tol, 1.0) <= 0:
            raise UsageError(f"--{tol.replace('_', '-')} must be positive")
    if getattr(args, "threads", 0):
        import numba
        numba.set_num_threads(args.threads)
    return args


def _config_echo(args):
    # the output path is where the report goes, not a compute parameter;
    # keeping it out makes reports byte-identical wherever they are written
    skip = {"command", "config", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def emit_report(report, args, out_path=None, stream=sys.stdout):
    """Print a helicity/flux report and optionally mirror it to a JSON file."""
    doc = {
        "artifact": {"name": "windhel", "version": __version__},
        "config": _config_echo(args),
        "kind": report.meta.get("kind"),
        "total": report.total,
        "self": {str(k): v for k, v in report.self_.items()},
        "mutual": report.mutual.tolist(),
        "mutual_totals": (2.0 * report.mutual).tolist(),
        "excluded_weight": report.excluded_weight,
        "reconstruction_abs_error": report.reconstruction_error,
        "meta": report.meta,
    }
    w = stream.write
    w(f"# windhel {__version__} {report.meta.get('kind')} report\n")
    w(f"total { fmt(report.total) }\n")
    for k, v in report.self_.items():
        w(f"self[{k}] {fmt(v)}\n")
    pairs = report.mutual_pairs()
    if pairs:
        w("# mutual: per ordered pair H_ij and total exchanged 2*H_ij\n")
        for (i, j), v in pairs.items():
            w(f"mutual[{i},{j}] {fmt(v)} {fmt(2 * v)}\n")
    else:
        w("# mutual: empty (single region)\n")
    w(f"excluded_weight {fmt(report.excluded_weight)}\n")
    w(f"reconstruction_abs_error {fmt(report.reconstruction_error)}\n")
    for k, v in sorted(report.meta.items()):
        w(f"# meta {k}: {v}\n")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
    return doc


def _cmd_make_field(args):
    n = args.n
    ext = args.extent
    grid = Grid3(n, n, n, 2 * ext / (n - 1), 2 * ext / (n - 1), args.height / (n - 1),
                 (-ext, -ext, 0.0))
    tau = args.tau if args.tau is not None else 2 * np.pi / args.height
    if args.kind == "uniform":
        f = uniform_vertical(grid, args.b0)
    elif args.kind == "tube":
        radius = args.radius if args.radius is not None else 1.0 / np.sqrt(np.pi)
        f = twisted_tube(grid, TubeSpec((0.0, 0.0), radius, args.b0, tau), edge=args.edge)
    elif args.kind == "helix":
        radius = args.radius if args.radius is not None else 0.2
        half = args.separation / 2
        f = double_helix_pair(grid,
                              TubeSpec((half, 0.0), radius, args.b0),
                              TubeSpec((-half, 0.0), radius, args.b0),
                              args.turns, edge=args.edge)
    elif args.kind == "dome":
        radius = args.radius if args.radius is not None else 0.55 * ext
        f = dome_field(grid, args.b0, DomeSpec((0.0, 0.0), 0.55 * radius, radius))
    else:  # dome3
        radius = args.radius if args.radius is not None else 0.32 * ext
        centers = 0.45 * ext * np.array(
            [[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]])
        domes = [DomeSpec((c[0], c[1]), 0.55 * radius, radius) for c in centers]
        f = dome_field(grid, args.b0, domes)
    save_field(f, args.out)
    print(f"wrote {args.out} ({args.kind}, {n}^3, divergence_max {fmt(divergence_max(f))})")
    return 0


def _cmd_make_series(args):
    plane = PlaneGrid(args.n, args.n, 2 * args.extent / (args.n - 1),
                      2 * args.extent / (args.n - 1), (-args.extent, -args.extent))
    series = rotating_patch_series(args.phi_i, args.phi_j, args.separation,
                                   args.omega, args.t_final, args.steps, plane,
                                   radius=args.radius)
    save_series(series, args.out)
    print(f"wrote {args.out} ({series.ntimes} times, {args.n}^2)")
    return 0


def _cmd_trace(args):
    f = load_field(args.field)
    step = args.step if args.step is not None else 0.5 * min(f.grid.dx, f.grid.dy, f.grid.dz)
    curves = []
    for seed in args.seed:
        line = trace(f, _parse_triple(seed), step, max_steps=args.max_steps,
                     eps_null=args.eps_null)
        curves.append(line)
        print(f"seed {seed}: {len(line)} vertices, stop reason {line.reason}")
    save_curves(curves, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_winding(args):
    curves = load_curves(args.curves)
    if len(curves) < 2:
        raise WindhelError(f"{args.curves}: need two curves, found {len(curves)}")
    result = winding_general(curves[0], curves[1])
    print(f"L {fmt(result.L)}")
    print(f"full_turns {result.full_turns}")
    print("# segment pairs: (i, j) sigma_product swept_angle_rad")
    for (i, j), ss, sweep in result.contributions:
        print(f"pair[{i},{j}] {ss:+d} {fmt(sweep)}")
    return 0


def _cmd_helicity(args):
    f = load_field(args.field)
    div = divergence_max(f)
    if div > 1e-3:
        print(f"# warning: divergence diagnostic {fmt(div)} above 1e-3 (advisory)")
    if args.form in ("gauge", "both"):
        print(f"helicity_gauge {fmt(helicity_gauge_form(f))}")
    if args.form in ("pairwise", "both"):
        print(f"helicity_pairwise {fmt(helicity_pairwise_form(f))}")
    if args.reference:
        from .helicity import relative_helicity
        ref = load_field(args.reference)
        print(f"relative_helicity {fmt(relative_helicity(f, ref))}")
    if args.mask:
        mask = load_mask(args.mask)
        report = decompose(f, mask)
        emit_report(report, args, out_path=args.out)
    elif args.out:
        from .regions import RegionMask
        mask = RegionMask(f.grid, np.zeros(f.grid.shape, dtype=np.int32))
        emit_report(decompose(f, mask), args, out_path=args.out)
    return 0


def _cmd_tube_mutual(args):
    curves = load_curves(args.curves)
    if len(curves) < 2:
        raise WindhelError(f"{args.curves}: need two curves, found {len(curves)}")
    t_i = ThinTube(curves[0], args.flux_i)
    t_j = ThinTube(curves[1], args.flux_j)
    L = winding_general(curves[0], curves[1]).L
    print(f"L {fmt(L)}")
    print(f"H_mutual {fmt(mutual_helicity_thin(t_i, t_j))}")
    return 0


def _cmd_arch_mutual(args):
    angles = arch_angles(_parse_pair(args.a_pos), _parse_pair(args.a_neg),
                         _parse_pair(args.b_pos), _parse_pair(args.b_neg))
    h = arch_mutual_helicity(angles, args.flux_i, args.flux_j)
    print(f"nu {fmt(angles.nu)}")
    print(f"rho {fmt(angles.rho)}")
    print(f"L {fmt((angles.rho - angles.nu) / (2 * np.pi))}")
    print(f"H_mutual {fmt(h)}")
    return 0


def _cmd_flux(args):
    series = load_series(args.series)
    if args.labels:
        stack = load_mask(args.labels)
        if stack.grid.nz != series.ntimes:
            raise WindhelError(
                f"label stack has {stack.grid.nz} frames, series has {series.ntimes}")
        series = PlanarSeries(series.nx, series.ny, series.dx, series.dy,
                              series.origin, series.times, series.bz,
                              series.wx, series.wy, labels=stack.labels)
        report = flux_decompose(series)
        emit_report(report, args, out_path=args.out)
        total = report.total
    else:
        total = flux_total(series)
    print(f"flux_total {fmt(total)}")
    print(f"flux_total_winding_accumulation {fmt(-total)}  "
          "# same value, opposite sign convention")
    return 0


def _cmd_label(args):
    f = load_field(args.field)
    mask = label_open_closed(f, seeds_per_cell=args.seeds_per_cell,
                             step=args.step, max_steps=args.max_steps,
                             eps_null=args.eps_null)
    save_mask(mask, args.out)
    print(f"wrote {args.out}: {mask.num_regions} regions, "
          f"undetermined fraction {fmt(mask.undetermined_fraction)}")
    return 0


_COMMANDS = {
    "make-field": _cmd_make_field,
    "make-series": _cmd_make_series,
    "trace": _cmd_trace,
    "winding": _cmd_winding,
    "helicity": _cmd_helicity,
    "tube-mutual": _cmd_tube_mutual,
    "arch-mutual": _cmd_arch_mutual,
    "flux": _cmd_flux,
    "label": _cmd_label,
}


def run(argv):
    """Parse and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        args = _apply_config(args, argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (WindhelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line interface: ``lgallee <subcommand> [options]``.

Exit codes: 0 success, 1 verification failure, 2 validation error, 3 I/O error,
4 numeric procedure failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

from . import bifurcation as bif
from . import presets, render
from .errors import DomainError, NumericalError, PreconditionError, ValidationError
from .io import write_atomic
from .model import DimensionalParams, ModelParams, nondimensionalize
from .verify import DEFAULT_TOLS, failures, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, need_qs=True):
    g = p.add_argument_group("parameters")
    g.add_argument("-A", type=float)
    g.add_argument("-M", type=float)
    if need_qs:
        g.add_argument("-Q", type=float)
        g.add_argument("-S", type=float)
        d = p.add_argument_group("dimensional parameters")
        d.add_argument("--dimensional", action="store_true")
        for name in ("r", "K", "q", "a", "s", "h", "m"):
            d.add_argument(f"-{name}", type=float, dest=f"dim_{name}")
    p.add_argument("--figure", help="figure preset id, e.g. F04b")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--format", choices=("csv", "svg", "both"), default="both")
    p.add_argument("--help", action="help", help="show this message and exit")


def build_parser():
    top = _Parser(prog="lgallee", add_help=False,
                  description="Equilibria, bifurcations and phase portraits of a Leslie-Gower "
                              "model with weak Allee effect.")
    top.add_argument("--help", action="help")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("equilibria", add_help=False)
    _common(p)
    p.add_argument("--rootscan", action="store_true", help="also sweep Q over [0.30, 0.42]")

    p = sub.add_parser("portrait", add_help=False)
    _common(p)
    p.add_argument("--trajectories", default="auto",
                   help='"auto", "none" (no integrated orbits) or "u,v;u,v;..."')
    p.add_argument("--basins", action="store_true")
    p.add_argument("--resolution", type=int, default=presets.BASIN_RESOLUTION)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bifurcation", add_help=False)
    _common(p, need_qs=False)
    p.add_argument("--window", type=float, nargs=4, metavar=("QMIN", "QMAX", "SMIN", "SMAX"))
    p.add_argument("--resolution", type=int, default=40)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("basins", add_help=False)
    _common(p)
    p.add_argument("--window", type=float, nargs=4, metavar=("UMIN", "UMAX", "VMIN", "VMAX"))
    p.add_argument("--resolution", type=int, default=presets.BASIN_RESOLUTION)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", add_help=False)
    _common(p)
    for name in DEFAULT_TOLS:
        p.add_argument(f"--tol-{name}", type=float, dest=f"tol_{name}")

    p = sub.add_parser("connection", add_help=False)
    _common(p, need_qs=False)
    p.add_argument("-Q", type=float)
    p.add_argument("--kind", choices=("heteroclinic", "homoclinic"), default="heteroclinic")
    p.add_argument("--bracket", type=float, nargs=2, metavar=("SLO", "SHI"))
    p.add_argument("--tol", type=float, default=1e-8, help="bisection stop width")
    return top


def _apply_figure(args):
    if not args.figure:
        return
    if args.figure not in presets.FIGURES:
        raise ValidationError(f"unknown figure {args.figure!r}; known: {', '.join(presets.FIGURES)}")
    fig = presets.FIGURES[args.figure]
    if fig["command"] != args.command and not (args.command == "basins" and fig["command"] == "portrait"):
        raise ValidationError(f"figure {args.figure} belongs to the {fig['command']} subcommand")
    for key in ("A", "M", "Q", "S"):
        if key in fig and hasattr(args, key):
            setattr(args, key, fig[key])
    if "window" in fig:
        args.window = list(fig["window"])
    if "resolution" in fig and hasattr(args, "resolution"):
        args.resolution = fig["resolution"]
    if fig.get("basins") and hasattr(args, "basins"):
        args.basins = True
    if fig.get("rootscan") and hasattr(args, "rootscan"):
        args.rootscan = True


def _params(args) -> ModelParams:
    dims = {n: getattr(args, f"dim_{n}", None) for n in "rKqashm"}
    if getattr(args, "dimensional", False):
        if any(getattr(args, k) is not None for k in "AMQS"):
            raise ValidationError("give either -A -M -Q -S or --dimensional, not both")
        missing = [n for n, v in dims.items() if v is None]
        if missing:
            raise ValidationError("--dimensional needs -r -K -q -a -s -h -m (missing: "
                                  + " ".join(f"-{n}" for n in missing) + ")")
        return nondimensionalize(DimensionalParams(**dims))
    if any(v is not None for v in dims.values()):
        raise ValidationError("dimensional flags require --dimensional")
    missing = [k for k in "AMQS" if getattr(args, k) is None]
    if missing:
        raise ValidationError("missing parameter(s): " + " ".join(f"-{k}" for k in missing))
    return ModelParams(args.A, args.M, args.Q, args.S)


def _am(args):
    if args.A is None or args.M is None:
        raise ValidationError("-A and -M are required")
    A, M = float(args.A), float(args.M)
    if not (math.isfinite(A) and 0 < A < 1):
        raise ValidationError("A must lie in (0,1)")
    if not math.isfinite(M):
        raise ValidationError("M must be finite")
    return A, M


def _stem(args, kind):
    return f"{args.figure}_{kind}" if args.figure else kind


def _outdir(args, default="."):
    d = args.out if args.out is not None else default
    return d


def _write_all(outdir, files):
    """Write (name, text) pairs after all content has been produced."""
    os.makedirs(outdir, exist_ok=True)
    for name, text in files:
        write_atomic(os.path.join(outdir, name), text)
        print(f"wrote {os.path.join(outdir, name)}")


def _want(args, ext):
    return args.format == "both" or (args.format == "csv" and ext != "svg") or \
        (args.format == "svg" and ext == "svg")


def cmd_equilibria(args):
    params = _params(args)
    lines, df = render.equilibria_report(params)
    print("\n".join(lines))
    files = []
    if args.out is not None or args.figure:
        files.append((f"{_stem(args, 'equilibria')}.txt", df.dumps()))
        if args.rootscan:
            scan, svg = render.root_scan(params.A, params.M)
            if _want(args, "csv"):
                files.append((f"{_stem(args, 'rootscan')}.txt", scan.dumps()))
            if _want(args, "svg"):
                files.append((f"{_stem(args, 'rootscan')}.svg", svg))
        _write_all(_outdir(args), files)
    return EXIT_OK


def _starts(spec):
    if spec == "auto":
        return render.DEFAULT_STARTS, True
    if spec in ("none", ""):
        return (), False
    out = []
    for item in spec.split(";"):
        try:
            u, v = (float(x) for x in item.split(","))
        except ValueError:
            raise ValidationError(f"bad trajectory start {item!r}; expected u,v") from None
        if not (math.isfinite(u) and math.isfinite(v)):
            raise ValidationError("trajectory starts must be finite")
        out.append((u, v))
    return tuple(out), True


def cmd_portrait(args):
    params = _params(args)
    starts, orbits = _starts(args.trajectories)
    if args.resolution < 1:
        raise ValidationError("resolution must be >= 1")
    title = args.figure or ""
    df, svg = render.portrait(params, starts, orbits, title)
    files = []
    if _want(args, "csv"):
        files.append((f"{_stem(args, 'portrait')}.csv", df.dumps()))
    if _want(args, "svg"):
        files.append((f"{_stem(args, 'portrait')}.svg", svg))
    if args.basins:
        grid, bdf, bsvg = render.basins(params, resolution=args.resolution, workers=args.workers,
                                        title=title)
        print("basins: " + ", ".join(f"{k}={v}" for k, v in grid.counts().items()))
        if _want(args, "csv"):
            files.append((f"{_stem(args, 'basins')}.csv", bdf.dumps()))
        if _want(args, "svg"):
            files.append((f"{_stem(args, 'basins')}.svg", bsvg))
    _write_all(_outdir(args), files)
    return EXIT_OK


def cmd_bifurcation(args):
    A, M = _am(args)
    window = tuple(args.window) if args.window else bif.DEFAULT_WINDOW
    if args.resolution < 1:
        raise ValidationError("resolution must be >= 1")
    diag = bif.diagram(A, M, window, args.resolution, workers=args.workers)
    print(f"SN lines: {', '.join(repr(q) for q in diag.sn_lines) or 'none'}")
    print(f"Hopf locus: {len(diag.hopf)} points, max S = {diag.hopf.max_s()[1]!r}")
    for p in diag.bt:
        print(f"BT {p.label}: Q={p.q!r} S={p.s!r} u={p.u!r}")
    df, svg = render.bifurcation(diag, args.figure or "")
    files = []
    if _want(args, "csv"):
        files.append((f"{_stem(args, 'bifurcation')}.txt", df.dumps()))
    if _want(args, "svg"):
        files.append((f"{_stem(args, 'bifurcation')}.svg", svg))
    _write_all(_outdir(args), files)
    return EXIT_OK


def cmd_basins(args):
    params = _params(args)
    window = tuple(args.window) if args.window else (0.0, 1.0, 0.0, 1.0)
    grid, df, svg = render.basins(params, window, args.resolution, args.workers, args.figure or "")
    print(", ".join(f"{k}={v}" for k, v in grid.counts().items()))
    files = []
    if _want(args, "csv"):
        files.append((f"{_stem(args, 'basins')}.csv", df.dumps()))
    if _want(args, "svg"):
        files.append((f"{_stem(args, 'basins')}.svg", svg))
    _write_all(_outdir(args), files)
    return EXIT_OK


def cmd_verify(args):
    params = _params(args)
    tols = {}
    for name in DEFAULT_TOLS:
        v = getattr(args, f"tol_{name}")
        if v is not None:
            if not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"--tol-{name} must be a finite non-negative number")
            tols[name] = v
    checks = run_checks(params, tols)
    for c in checks:
        print(c.line())
    bad = failures(checks)
    if bad:
        print("FAILED: " + ", ".join(c.name for c in bad))
        return EXIT_VERIFY
    print(f"all {sum(not c.informational for c in checks)} checks passed")
    return EXIT_OK


def cmd_connection(args):
    from .dynamics import connection_search

    base = presets.CONNECTIONS[args.kind]
    if args.figure:
        if args.figure != "F09b":
            raise ValidationError("only F09b is a connection preset")
        args.kind = "heteroclinic"
        base = presets.CONNECTIONS["heteroclinic"]
    A = args.A if args.A is not None else base["A"]
    M = args.M if args.M is not None else base["M"]
    Q = args.Q if args.Q is not None else base["Q"]
    lo, hi = args.bracket if args.bracket else base["bracket"]
    if not lo < hi:
        raise ValidationError("bracket must satisfy SLO < SHI")
    ModelParams(A, M, Q, lo)
    ModelParams(A, M, Q, hi)

    def show(S, d):
        print(f"S={S!r:24s} separation={d:+.6e}")

    res = connection_search(A, M, Q, (lo, hi), args.kind, tol=args.tol, callback=show)
    print(f"S_c = {res.S_c!r}" if res.found else "no sign change")
    if args.out is not None:
        _write_all(args.out, [(f"{_stem(args, 'connection')}.txt",
                               render.connection_log(res, A, M, Q).dumps())])
    return EXIT_OK


COMMANDS = {
    "equilibria": cmd_equilibria,
    "portrait": cmd_portrait,
    "bifurcation": cmd_bifurcation,
    "basins": cmd_basins,
    "verify": cmd_verify,
    "connection": cmd_connection,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help()
            return EXIT_VALIDATION
        if args.command != "connection":
            _apply_figure(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return COMMANDS[args.command](args)
    except (UsageError, ValidationError, PreconditionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        branch = getattr(exc, "branch", None)
        extra = f" [branch {branch}]" if branch else ""
        print(f"numeric failure: {exc}{extra}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    monopole-eikonal validate CONFIG
    monopole-eikonal focal CONFIG [--json]
    monopole-eikonal sigma|amplitude|oracle CONFIG (--p RE,IM | --grid RE0,RE1,N[,IM]) [--json]
    monopole-eikonal compare CONFIG --grid ... [--method M] [--out FILE]
    monopole-eikonal scan CONFIG --grid ... --mode MODE [--out PATH]
    monopole-eikonal zoom CONFIG --focal-index K --window W --resolution N [--mode MODE] [--out DIR]

Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import classical, oracle, scan
from .chargeconf import load_config, serialize_config
from .errors import MonopoleEikonalError, NumericalError, ValidationError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; status 2 is reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _momentum(text: str) -> complex:
    parts = [x.strip() for x in text.split(",")]
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError("expected RE or RE,IM")
    try:
        vals = [float(x) for x in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _grid(text: str) -> scan.GridSpec:
    parts = [x.strip() for x in text.split(",")]
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("expected RE0,RE1,N[,IM]")
    try:
        re0, re1 = float(parts[0]), float(parts[1])
        n = int(parts[2])
        im = float(parts[3]) if len(parts) == 4 else 0.0
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if n < 1:
        raise argparse.ArgumentTypeError("N must be positive")
    return scan.real_grid(re0, re1, n, im)


def _num(x: float):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _cplx(z: complex):
    return [_num(z.real), _num(z.imag)]


def _points_args(sp):
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=_momentum, help="momentum transfer RE,IM")
    g.add_argument("--grid", type=_grid, help="real-axis grid RE0,RE1,N[,IM]")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out", help="CSV destination for grids (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="monopole-eikonal", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="print the normalized config")
    sp.add_argument("config")

    sp = sub.add_parser("focal", help="list focal points")
    sp.add_argument("config")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("sigma", help="classical cross section")
    sp.add_argument("config")
    _points_args(sp)

    sp = sub.add_parser("amplitude", help="closed-form eikonal amplitude")
    sp.add_argument("config")
    _points_args(sp)
    sp.add_argument("--method", default="auto", choices=["auto", "dyon", "whittaker", "bessel"])

    sp = sub.add_parser("oracle", help="contour-integral amplitude")
    sp.add_argument("config")
    _points_args(sp)
    sp.add_argument("--tol", type=float, default=oracle.DEFAULT_TOL)

    sp = sub.add_parser("compare", help="closed form against the oracle")
    sp.add_argument("config")
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--method", default="auto", choices=["auto", "dyon", "whittaker", "bessel"])
    sp.add_argument("--tol", type=float, default=oracle.DEFAULT_TOL)
    sp.add_argument("--out", help="CSV destination (default stdout)")

    sp = sub.add_parser("scan", help="evaluate a mode over a grid")
    sp.add_argument("config")
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--mode", default="classical", choices=[m.value for m in scan.ScanMode])
    sp.add_argument("--out", help="file or directory (default stdout)")

    sp = sub.add_parser("zoom", help="square window around a focal momentum")
    sp.add_argument("config")
    sp.add_argument("--focal-index", type=int, default=0)
    sp.add_argument("--window", type=float, required=True)
    sp.add_argument("--resolution", type=int, default=41)
    sp.add_argument("--mode", default="eikonal_closed", choices=[m.value for m in scan.ScanMode])
    sp.add_argument("--out", help="directory (default stdout); off-axis focal points also get a real-p slice there")
    return ap


# ------------------------------------------------------------- commands

def _emit_table(table, out, stdout):
    if out is None:
        scan.emit_csv(table, stdout)
    else:
        path = scan.emit_csv(table, out)
        print(path, file=stdout)


def _cmd_validate(cfg, args, out):
    out.write(serialize_config(cfg))


def _cmd_focal(cfg, args, out):
    pts = classical.focal_points(cfg)
    if args.json:
        json.dump([
            {"b_f": _cplx(fp.b_f), "p_f": _cplx(fp.p_f), "degenerate": fp.degenerate,
             "at_infinity": fp.at_infinity}
            for fp in pts
        ], out)
        out.write("\n")
        return
    for fp in pts:
        tag = " degenerate at infinity" if fp.at_infinity else ""
        out.write(f"b_f = {fp.b_f!r}  p_f = {fp.p_f!r}{tag}\n")


def _single(args, out, payload, text):
    if args.json:
        json.dump(payload, out)
        out.write("\n")
    else:
        out.write(text + "\n")


def _cmd_sigma(cfg, args, out):
    if args.grid is not None:
        _emit_table(scan.scan_cross_section(cfg, args.grid, "classical"), args.out, out)
        return
    s = classical.classical_cross_section(cfg, args.p)
    _single(args, out, {"p": _cplx(args.p), "sigma": _num(s)}, repr(s))


def _cmd_amplitude(cfg, args, out):
    if args.grid is not None:
        if args.method != "auto":
            raise ValidationError("--method applies to single points only", "method")
        _emit_table(scan.scan_cross_section(cfg, args.grid, "eikonal_closed"), args.out, out)
        return
    s = oracle.closed_form_amplitude(cfg, args.p, args.method)
    _single(args, out,
            {"p": _cplx(args.p), "f": _cplx(s.f), "method": s.method.value,
             "est_rel_err": _num(s.est_rel_err)},
            f"{s.f.real!r} {s.f.imag!r}")


def _cmd_oracle(cfg, args, out):
    if args.grid is not None:
        _emit_table(scan.scan_cross_section(cfg, args.grid, "eikonal_oracle", args.tol), args.out, out)
        return
    r = oracle.amplitude_oracle(cfg, args.p, args.tol)
    _single(args, out,
            {"p": _cplx(args.p), "f": _cplx(r.f), "est_err": _num(r.est_err),
             "regulator_alpha": r.regulator_alpha, "shortfall": r.shortfall},
            f"{r.f.real!r} {r.f.imag!r}")


def _cmd_compare(cfg, args, out):
    rep = oracle.compare_amplitudes(cfg, args.grid.points, args.method, args.tol)
    rep.to_csv(out if args.out is None else args.out)
    verdict = "pass" if rep.passed else "fail"
    print(f"{rep.method}: abs spread {rep.abs_spread!r}, arg spread {rep.arg_spread!r} -> {verdict}",
          file=sys.stderr)
    for note in rep.notes:
        print(note, file=sys.stderr)


def _cmd_scan(cfg, args, out):
    _emit_table(scan.scan_cross_section(cfg, args.grid, args.mode), args.out, out)


def _cmd_zoom(cfg, args, out):
    table = scan.focal_zoom(cfg, args.focal_index, args.window, args.resolution, args.mode)
    _emit_table(table, args.out, out)
    pf = scan.focal_momenta(cfg)[args.focal_index]
    if pf.imag != 0 and args.out is not None:
        # only real momentum transfers are observable
        sl = scan.focal_real_slice(cfg, args.focal_index, args.window, args.resolution, args.mode)
        _emit_table(sl, args.out, out)


COMMANDS = {
    "validate": _cmd_validate,
    "focal": _cmd_focal,
    "sigma": _cmd_sigma,
    "amplitude": _cmd_amplitude,
    "oracle": _cmd_oracle,
    "compare": _cmd_compare,
    "scan": _cmd_scan,
    "zoom": _cmd_zoom,
}


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        COMMANDS[args.command](cfg, args, stdout)
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MonopoleEikonalError, IndexError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line experiment runner.

Exit codes: 0 success, 1 a reported error exceeds ``--threshold``, 2 invalid
input, 3 numerical failure (a partial report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import errors
from .currents import Box, TestFunction, liouville_box
from .deriv import (
    DerivativeReport,
    cauchy_derivative,
    d1_lamination,
    d1_quakebend,
    d2_lamination,
    decay_profile,
    earthquake_path,
    fd_derivative,
    kj_stabilization,
    receding_family,
)
from .earthquake import elementary_earthquake
from .hyp_core import Geodesic, MobiusMap, as_point
from .lamination import FiniteLamination, orbit_lamination, read_lamination, thurston_norm_estimate, validate
from .suite import DECAY_BOX, REGRESSION_SUITE, orbit_configuration

EXIT_OK, EXIT_THRESHOLD, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    lamination: Optional[str] = None
    test_function: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    format: str = "text"
    output: Optional[str] = None

    def __post_init__(self):
        tol = self.params.get("tol")
        if tol is not None and not tol > 0:
            raise InputError("tolerances must be positive")
        tau = self.params.get("tau")
        if tau is not None and not np.isfinite(parse_complex(tau)):
            raise InputError("tau must be finite")


# ---------------------------------------------------------------------------
# formatting


def fmt_number(x) -> str:
    """Shortest round-trip decimal; complex numbers as re+imi."""
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        if x.imag == 0:
            return repr(x.real)
        sign = "+" if math.copysign(1.0, x.imag) > 0 else "-"
        return f"{x.real!r}{sign}{abs(x.imag)!r}i"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _json_value(x):
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(np.real(x)), "im": float(np.imag(x))}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _csv_cells(row: dict):
    header, cells = [], []
    for key, val in row.items():
        if isinstance(val, (complex, np.complexfloating)):
            header += [f"{key}_re", f"{key}_im"]
            cells += [repr(float(np.real(val))), repr(float(np.imag(val)))]
        else:
            header.append(key)
            cells.append(fmt_number(val))
    return header, cells


def render(config: ExperimentConfig, rows: list, summary: dict) -> str:
    if config.format == "json":
        doc = {
            "config": asdict(config),
            "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows],
            "summary": {k: _json_value(v) for k, v in summary.items()},
        }
        return json.dumps(doc, indent=2, default=str) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        # complex columns are split whenever any row has a complex entry
        complex_keys = {k for r in rows for k, v in r.items() if isinstance(v, (complex, np.complexfloating))}
        rows = [{k: (complex(v) if k in complex_keys else v) for k, v in r.items()} for r in rows]
        if config.format == "csv":
            writer.writerow(_csv_cells(rows[0])[0])
            for r in rows:
                writer.writerow(_csv_cells(r)[1])
        else:
            for r in rows:
                writer.writerow([fmt_number(v) for v in r.values()])
    prefix = "# " if config.format == "csv" else ""
    for k, v in summary.items():
        buf.write(f"{prefix}{k}={fmt_number(v)}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# input parsing


def parse_complex(text) -> complex:
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def _load_lamination(args) -> tuple:
    if getattr(args, "suite", None):
        cfg = REGRESSION_SUITE.get(args.suite)
        if cfg is None:
            raise InputError(f"unknown suite configuration {args.suite!r}; choose from {sorted(REGRESSION_SUITE)}")
        return cfg.lamination, f"suite:{args.suite}"
    if getattr(args, "lamination", None):
        try:
            return read_lamination(args.lamination), args.lamination
        except OSError as exc:
            raise InputError(str(exc)) from exc
    if getattr(args, "orbit", None):
        vals = args.orbit
        if len(vals) not in (4, 5):
            raise InputError("--orbit takes SCALE P Q N [WEIGHT]")
        scale, p, q, n = float(vals[0]), vals[1], vals[2], int(float(vals[3]))
        w = float(vals[4]) if len(vals) == 5 else 1.0
        if not scale > 0 or scale == 1:
            raise InputError("orbit scale must be positive and different from 1")
        s = math.sqrt(scale)
        mu = orbit_lamination(MobiusMap(s, 0.0, 0.0, 1 / s), Geodesic.of(as_point(p), as_point(q)), w, n)
        return mu, "orbit:" + " ".join(vals)
    if getattr(args, "leaf", None):
        mu = FiniteLamination(tuple((Geodesic.of(as_point(p), as_point(q)), float(w)) for p, q, w in args.leaf))
        return mu, "inline"
    raise InputError("give a lamination with --lamination, --orbit, --leaf or --suite")


def _test_function(args, default_box=None) -> TestFunction:
    box_vals = args.box
    if box_vals is None:
        if getattr(args, "suite", None):
            return REGRESSION_SUITE[args.suite].xi
        if default_box is None:
            raise InputError("--box a b c d is required")
        box_vals = default_box
    box = Box.of(*(as_point(v) for v in box_vals))
    lam = getattr(args, "lam", 1.0)
    return TestFunction(box, lam, 1.0, "tent" if lam == 1.0 else "bump")


def _tf_dict(xi: TestFunction) -> dict:
    return {
        "kind": xi.kind,
        "box": [fmt_number(p.value) if not p.is_infinite else "inf" for p in xi.support.corners],
        "lambda": xi.holder_exponent,
    }


# ---------------------------------------------------------------------------
# commands; each returns (config, rows, summary, exit code)


def cmd_liouville(args):
    xi = _test_function(args)
    mass = liouville_box(xi.support)
    config = ExperimentConfig("liouville", None, _tf_dict(xi), {}, args.format, args.output)
    return config, [{"mass": mass}], {}, EXIT_OK


def cmd_earthquake_eval(args):
    mu, source = _load_lamination(args)
    tau = parse_complex(args.tau)
    f = elementary_earthquake(mu, tau)
    rows = []
    for token in args.points:
        img = f(as_point(token))
        val = img.value
        rows.append({"point": token, "image": "inf" if val == math.inf else val})
    config = ExperimentConfig("quake-eval", source, {}, {"tau": fmt_number(tau)}, args.format, args.output)
    return config, rows, {}, EXIT_OK


def _report_row(name, report: DerivativeReport):
    return {"config": name, "closed_form": report.closed_form, "oracle": report.oracle,
            "abs_err": report.abs_err, "rel_err": report.rel_err}


def _derivative_command(args, kind):
    mu, source = _load_lamination(args)
    validate(mu)
    xi = _test_function(args)
    tol = args.tol
    params = {"tol": tol, "threshold": args.threshold}
    rows, summary = [], {}
    config = None
    try:
        if kind == "d1":
            params.update(step=args.step, path_tol=args.path_tol)
            config = ExperimentConfig("d1", source, _tf_dict(xi), params, args.format, args.output)
            closed = d1_lamination(mu, xi, tol)
            fd = fd_derivative(earthquake_path(mu, xi, args.path_tol), 0.0, args.step, 1)
            rep = DerivativeReport.compare(closed, fd.value, fd_raw=fd.raw)
        elif kind == "d2":
            params.update(step=args.step, path_tol=args.path_tol)
            config = ExperimentConfig("d2", source, _tf_dict(xi), params, args.format, args.output)
            closed = d2_lamination(mu, xi, tol)
            fd = fd_derivative(earthquake_path(mu, xi, args.path_tol), 0.0, args.step, 2)
            rep = DerivativeReport.compare(closed, fd.value, fd_raw=fd.raw)
        else:
            tau = parse_complex(args.tau)
            params.update(tau=fmt_number(tau), radius=args.radius, points=args.points)
            config = ExperimentConfig("d1-quakebend", source, _tf_dict(xi), params, args.format, args.output)
            closed = d1_quakebend(mu, tau, xi, tol)
            cd = cauchy_derivative(earthquake_path(mu, xi, tol, "dyadic"), tau, args.radius, args.points, 1)
            rep = DerivativeReport.compare(closed, cd.value, radius=cd.radius)
            summary["cauchy_radius"] = cd.radius
    except errors.NumericalFailure as exc:
        if config is None:
            config = ExperimentConfig(kind, source, _tf_dict(xi), params, args.format, args.output)
        summary["error"] = f"{type(exc).__name__}: {exc}"
        return config, rows, summary, EXIT_NUMERICAL
    rows.append(_report_row(source, rep))
    passed = rep.rel_err <= args.threshold
    summary["status"] = "pass" if passed else "fail"
    return config, rows, summary, EXIT_OK if passed else EXIT_THRESHOLD


def cmd_d1(args):
    return _derivative_command(args, "d1")


def cmd_d2(args):
    return _derivative_command(args, "d2")


def cmd_d1_quakebend(args):
    return _derivative_command(args, "quakebend")


def _read_geodesics(path):
    geos = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].split()
            if line:
                if len(line) != 2:
                    raise InputError(f"geodesic lines need two endpoints: {line}")
                geos.append(Geodesic.of(as_point(line[0]), as_point(line[1])))
    return geos


def cmd_decay(args):
    xi = _test_function(args, default_box=[str(v) for v in DECAY_BOX])
    if args.geodesics:
        try:
            geos = _read_geodesics(args.geodesics)
        except OSError as exc:
            raise InputError(str(exc)) from exc
    else:
        if args.count < 2:
            raise InputError("the receding family needs at least two geodesics")
        geos = receding_family(xi, args.count, args.dmin, args.dmax)
    if len(geos) < 2:
        raise InputError("need at least two geodesics")
    params = {"tol": args.tol, "count": len(geos), "dmin": args.dmin, "dmax": args.dmax}
    config = ExperimentConfig("decay", None, _tf_dict(xi), params, args.format, args.output)
    fit = decay_profile(xi, geos, args.tol)
    rows = [{"distance": float(d), "magnitude": float(m)} for d, m in zip(fit.distances, fit.magnitudes)]
    target = -(1 + xi.holder_exponent) + 0.2
    summary = {"intercept": fit.fitted_intercept, "bound": target, "slope": fit.fitted_slope}
    code = EXIT_OK if fit.fitted_slope <= target else EXIT_THRESHOLD
    return config, rows, summary, code


def cmd_kj(args):
    if args.orbit is None and args.lamination is None and args.leaf is None and args.suite is None:
        conf = orbit_configuration()
        mu, source = conf.lamination, "orbit:4 1 2 25"
        xi = conf.xi if args.box is None else _test_function(args)
    else:
        mu, source = _load_lamination(args)
        xi = _test_function(args)
    tau = parse_complex(args.tau)
    radii = [float(r) for r in args.radii]
    params = {"tau": fmt_number(tau), "tol": args.tol, "radii": radii}
    config = ExperimentConfig("kj", source, _tf_dict(xi), params, args.format, args.output)
    try:
        table = kj_stabilization(mu, xi, radii, tau, args.tol)
        full = d1_quakebend(mu, tau, xi, args.tol)
    except errors.NumericalFailure as exc:
        return config, [], {"error": f"{type(exc).__name__}: {exc}"}, EXIT_NUMERICAL
    rows = [{"radius": r.radius, "leaves": r.leaves, "value": complex(r.value)} for r in table]
    last_gap = abs(complex(table[-1].value) - complex(table[-2].value)) if len(table) > 1 else 0.0
    summary = {"full": complex(full), "last_difference": last_gap,
               "full_difference": abs(complex(table[-1].value) - complex(full))}
    ok = last_gap <= args.threshold and summary["full_difference"] <= args.threshold
    return config, rows, summary, EXIT_OK if ok else EXIT_THRESHOLD


def cmd_thurston(args):
    mu, source = _load_lamination(args)
    validate(mu)
    est = thurston_norm_estimate(mu, args.samples, args.seed)
    config = ExperimentConfig("thurston-estimate", source, {}, {"samples": args.samples, "seed": args.seed},
                              args.format, args.output)
    rows = [{"estimate": est.value, "crossed": " ".join(map(str, est.crossed)), "source": est.source}]
    return config, rows, {"arcs_tried": est.arcs_tried, "total_weight": mu.total_weight}, EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def _common(p, tol=1e-8):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--tol", type=float, default=tol, help="numerical tolerance")
    p.add_argument("--seed", type=int, default=0, help="random seed")


def _lamination_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lamination", help="file with lines 'p_minus p_plus weight'")
    g.add_argument("--orbit", nargs="+", metavar="V", help="SCALE P Q N [WEIGHT]: orbit of (P,Q) under z -> SCALE z")
    g.add_argument("--leaf", nargs=3, action="append", metavar=("P", "Q", "W"), help="inline leaf")
    g.add_argument("--suite", help=f"regression configuration: {', '.join(REGRESSION_SUITE)}")


def _box_args(p):
    p.add_argument("--box", nargs=4, metavar=("A", "B", "C", "D"), help="support box [A,B]x[C,D]")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="Hölder exponent of the test function")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liouquake", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("liouville", help="Liouville mass of a box")
    p.add_argument("--box", nargs=4, required=True, metavar=("A", "B", "C", "D"))
    _common(p)
    p.set_defaults(func=cmd_liouville, lam=1.0)

    p = sub.add_parser("quake-eval", help="evaluate an earthquake or quake-bend on boundary points")
    _lamination_args(p)
    p.add_argument("--tau", default="0")
    p.add_argument("--points", nargs="+", required=True)
    _common(p)
    p.set_defaults(func=cmd_earthquake_eval)

    for name, func, step, thr in (("d1", cmd_d1, 1e-4, 1e-5), ("d2", cmd_d2, 1e-3, 1e-3)):
        p = sub.add_parser(name, help=f"closed-form {name} against finite differences")
        _lamination_args(p)
        _box_args(p)
        p.add_argument("--step", type=float, default=step)
        p.add_argument("--path-tol", type=float, default=1e-13, help="quadrature tolerance along the path")
        p.add_argument("--threshold", type=float, default=thr)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("d1-quakebend", help="quake-bend derivative against the Cauchy integral")
    _lamination_args(p)
    _box_args(p)
    p.add_argument("--tau", default="0")
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--points", type=int, default=32)
    p.add_argument("--threshold", type=float, default=1e-3)
    _common(p, tol=1e-10)
    p.set_defaults(func=cmd_d1_quakebend)

    p = sub.add_parser("decay", help="decay of the first-derivative integral along receding geodesics")
    _box_args(p)
    p.add_argument("--geodesics", help="file with lines 'p q' (default: receding family)")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--dmin", type=float, default=1.0)
    p.add_argument("--dmax", type=float, default=8.0)
    _common(p, tol=1e-7)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("kj", help="derivative of disk truncations of a lamination")
    _lamination_args(p)
    _box_args(p)
    p.add_argument("--tau", default="0")
    p.add_argument("--radii", nargs="+", default=["0.5", "1", "2", "4", "8", "16", "32", "64"])
    p.add_argument("--threshold", type=float, default=1e-6)
    _common(p, tol=1e-9)
    p.set_defaults(func=cmd_kj)

    p = sub.add_parser("thurston-estimate", help="sampled lower bound for the Thurston norm")
    _lamination_args(p)
    p.add_argument("--samples", type=int, default=256)
    _common(p)
    p.set_defaults(func=cmd_thurston)
    return parser


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config, rows, summary, code = args.func(args)
    except (InputError, errors.ValidationFailed, errors.DegenerateConfiguration, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except errors.NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.command == "liouville" and args.format == "text":
        _emit(fmt_number(rows[0]["mass"]) + "\n", args.output)
    else:
        _emit(render(config, rows, summary), args.output)
    if code == EXIT_NUMERICAL and "error" in summary:
        print(summary["error"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

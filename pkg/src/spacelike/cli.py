"""Command-line front end.

    spacelike curvature --surface helicoid --domain sector --h 0.025 --out run/
    spacelike solve --domain disc --boundary affine 0.2 0.1 0.05 --out run/
    spacelike verify --surface helicoid --domain sector --out run/
    spacelike catalog --surface hyperboloid --points "1,0;0.5,0.5"

Exit codes: 0 success, 1 usage error (including a field that is not a
solution), 2 solver did not converge, 3 some check returned ``holds = false``.
Settings may also come from ``--config FILE`` (``key = value`` lines); flags
given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analysis, catalog, curvature, svg
from . import field as F
from .errors import LineSearchStalled, NotASolution, SpacelikeError
from .solver import SolverParams, _jsonable, residual, solve_dirichlet

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_CHECK_FAILED = 0, 1, 2, 3

DEFAULTS = {
    "domain": "disc",
    "h": 0.05,
    "radius": 1.0,
    "r_inner": 1.2,
    "r_outer": 3.0,
    "side": 1.0,
    "half_angle": 0.75 * math.pi,
    "surface": None,
    "boundary": None,
    "field": None,
    "out": ".",
    "svg": False,
    "seed": 0,
    "tol": None,
    "max_iter": 50,
    "init": "auto",
    "margin": None,
    "points": None,
}
SOLVER_KEYS = ("delta_space", "mu0", "gap_min", "min_step_exp", "armijo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="spacelike", description="Curvature, Dirichlet solves and checks for spacelike graphs.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags override it")
    common.add_argument("--domain", choices=("disc", "annulus", "square", "sector"))
    common.add_argument("--h", type=float, help="grid spacing")
    common.add_argument("--radius", type=float, help="disc radius")
    common.add_argument("--r-inner", dest="r_inner", type=float)
    common.add_argument("--r-outer", dest="r_outer", type=float)
    common.add_argument("--side", type=float, help="square side")
    common.add_argument("--half-angle", dest="half_angle", type=float, help="sector half angle (rad)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--svg", action="store_const", const=True, help="also write SVG heatmaps")
    common.add_argument("--seed", type=int)

    source = _Parser(add_help=False)
    source.add_argument("--surface", help="catalog surface, e.g. helicoid or plane:0.2,0.1,0")
    source.add_argument("--field", help="field CSV written by a previous run")
    source.add_argument(
        "--boundary",
        nargs="+",
        metavar="SPEC",
        help="'affine a b c', 'surface NAME' or 'file PATH'",
    )

    solver = _Parser(add_help=False)
    solver.add_argument("--tol", type=float, help="residual tolerance (default relative 1e-10)")
    solver.add_argument("--max-iter", dest="max_iter", type=int)
    solver.add_argument("--init", choices=("auto", "affine", "harmonic"))
    solver.add_argument("--margin", type=int, help="boundary rings skipped by pointwise checks")

    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("curvature", parents=[common, source], help="write the invariant CSV")
    sp = sub.add_parser("solve", parents=[common, source, solver], help="solve the Dirichlet problem")
    sp.add_argument("--verify", action="store_const", const=True, help="run the checks on the solution")
    sub.add_parser("verify", parents=[common, source, solver], help="run the geometric checks")
    cp = sub.add_parser("catalog", parents=[common], help="closed forms at points")
    cp.add_argument("--surface")
    cp.add_argument("--points", help="'x,y;x,y;...'")
    return p


def read_config(path):
    cfg = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, _, value = line.partition("=")
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _coerce(key, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    if raw.lower() in ("", "none"):
        return None
    if key in ("h", "radius", "r_inner", "r_outer", "side", "half_angle", "tol"):
        return float(raw)
    if key in ("seed", "max_iter", "margin"):
        return int(raw)
    if key in ("svg", "verify"):
        return raw.lower() in ("1", "true", "yes", "on")
    if key == "boundary":
        return raw.split()
    return raw


def resolve(args):
    """Merge defaults, config file and flags into one settings dict."""
    cfg = read_config(args.config) if args.config else {}
    settings = dict(DEFAULTS, verify=False)
    solver_extra = {}
    for key, raw in cfg.items():
        if key in SOLVER_KEYS:
            solver_extra[key] = raw
        elif key in settings:
            try:
                settings[key] = _coerce(key, raw)
            except ValueError as exc:
                raise UsageError(f"config {key}: {exc}") from None
        else:
            raise UsageError(f"unknown config key {key!r}")
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        settings[key] = val
    settings["command"] = args.command
    settings["solver_extra"] = solver_extra
    if not settings["h"] > 0:
        raise UsageError("--h must be positive")
    return settings


def make_shape(s):
    d = s["domain"]
    if d == "disc":
        return F.disc(s["radius"])
    if d == "annulus":
        return F.annulus(s["r_inner"], s["r_outer"])
    if d == "square":
        return F.square(s["side"])
    if d == "sector":
        return F.sector(s["r_inner"], s["r_outer"], s["half_angle"])
    raise UsageError(f"unknown domain {d!r}")


def make_mask(s):
    mask = F.DomainMask.from_shape(make_shape(s), s["h"])
    if min(mask.dims) < 8:
        raise UsageError(f"grid {mask.dims} is smaller than 8x8; decrease --h")
    return mask


def boundary_mask(s):
    spec = s["boundary"]
    kind, rest = spec[0], spec[1:]
    if kind == "affine":
        if len(rest) != 3:
            raise UsageError("--boundary affine needs three numbers a b c")
        a, b, c = (float(t) for t in rest)
        return make_mask(s).with_boundary_values(lambda x, y: a * x + b * y + c)
    if kind == "surface" and len(rest) == 1:
        return F.sample(_surface(rest[0]).surface, make_mask(s)).mask
    if kind == "file" and len(rest) == 1:
        return F.GridField.from_csv(rest[0]).mask
    raise UsageError(f"bad --boundary {' '.join(spec)!r}")


def _surface(name):
    try:
        return catalog.get(name)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def load_field(s):
    given = [k for k in ("surface", "field") if s[k]]
    if len(given) != 1:
        raise UsageError("give exactly one of --surface or --field")
    if s["field"]:
        return F.GridField.from_csv(s["field"])
    return F.sample(_surface(s["surface"]).surface, make_mask(s))


def solver_params(s):
    cfg = dict(s["solver_extra"], max_iter=s["max_iter"], tol_res=s["tol"])
    return SolverParams.from_config(cfg)


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _svgs(s, field, grids):
    if not s["svg"]:
        return
    for name, arr in grids.items():
        svg.heatmap(arr, title=name, path=os.path.join(s["out"], f"{name}.svg"))


def _points(text):
    try:
        pts = [tuple(float(c) for c in p.split(",")) for p in text.split(";") if p.strip()]
    except ValueError:
        raise UsageError(f"bad --points {text!r}") from None
    if not pts or any(len(p) != 2 for p in pts):
        raise UsageError(f"bad --points {text!r}")
    return np.array(pts)


# --------------------------------------------------------------------------
# commands


def cmd_curvature(s):
    field = load_field(s)
    grids = curvature.write_invariants_csv(field, os.path.join(s["out"], "curvature.csv"))
    _svgs(s, field, {k: grids[k] for k in ("H_R", "H_L", "K_R")})
    return EXIT_OK


def cmd_solve(s):
    if not s["boundary"]:
        raise UsageError("solve needs --boundary")
    mask = boundary_mask(s)
    try:
        field, report = solve_dirichlet(mask, init=s["init"], params=solver_params(s))
    except LineSearchStalled as exc:
        print(f"spacelike: {exc}", file=sys.stderr)
        if exc.report is not None:
            exc.report.to_json(os.path.join(s["out"], "solve_report.json"))
        if exc.field is not None:
            exc.field.to_csv(os.path.join(s["out"], "solution.csv"))
        return EXIT_NOT_CONVERGED
    code = EXIT_OK
    if report.converged and s["verify"]:
        report.verification = analysis.verify_field(
            field, solution_tol=max(10 * report.tol_res, 1e-8), seed=s["seed"], margin=s["margin"]
        )
        if not report.verification["all_hold"]:
            code = EXIT_CHECK_FAILED
    field.to_csv(os.path.join(s["out"], "solution.csv"))
    report.to_json(os.path.join(s["out"], "solve_report.json"))
    _svgs(s, field, {"u": np.where(field.mask.active, field.values, np.nan)})
    if not report.converged:
        print(f"spacelike: no convergence in {report.iterations} iterations", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return code


def cmd_verify(s):
    if s["boundary"]:
        mask = boundary_mask(s)
        try:
            field, report = solve_dirichlet(mask, init=s["init"], params=solver_params(s))
        except LineSearchStalled as exc:
            print(f"spacelike: {exc}", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        if not report.converged:
            return EXIT_NOT_CONVERGED
        tol = max(10 * report.tol_res, 1e-8)
    else:
        field = load_field(s)
        tol = s["tol"]
    path = os.path.join(s["out"], "verify.json")
    try:
        out = analysis.verify_field(field, solution_tol=tol, seed=s["seed"], margin=s["margin"])
    except NotASolution as exc:
        _write_json({"refused": str(exc), "residual_norm_inf": residual(field).norm_inf}, path)
        raise
    _write_json(out, path)
    for c in out["checks"]:
        print(f"{c['name']:28s} {'holds' if c['holds'] else 'FAILS'}  lhs={c['lhs']:.6g}")
    return EXIT_OK if out["all_hold"] else EXIT_CHECK_FAILED


def cmd_catalog(s):
    if not s["surface"]:
        print("\n".join(catalog.NAMES))
        return EXIT_OK
    entry = _surface(s["surface"])
    pts = _points(s["points"] or "2,0")
    x, y = pts[:, 0], pts[:, 1]
    if not np.all(entry.surface.domain(x, y)):
        raise UsageError(f"some points lie outside the domain of {entry.name}")
    jets = entry.surface.jet(x, y)
    inv = curvature.invariants(jets)
    rows = []
    for k in range(len(pts)):
        known = {name: float(np.asarray(fn(x[k], y[k]))) for name, fn in sorted(entry.known.items())}
        rows.append(
            {
                "point": [float(x[k]), float(y[k])],
                "u": float(jets.u[k]),
                "known": known,
                "computed": {
                    "H_R": float(inv.h_r[k]),
                    "H_L": float(inv.h_l[k]),
                    "K_R": float(inv.k_r[k]),
                    "K_L": float(inv.k_l[k]),
                },
            }
        )
    out = {"surface": entry.name, "is_solution": entry.is_solution, "points": rows}
    text = json.dumps(_jsonable(out), indent=2, sort_keys=True)
    print(text)
    if s["out"] != ".":
        _write_json(out, os.path.join(s["out"], "catalog.json"))
    return EXIT_OK


COMMANDS = {"curvature": cmd_curvature, "solve": cmd_solve, "verify": cmd_verify, "catalog": cmd_catalog}


def run(settings) -> int:
    os.makedirs(settings["out"], exist_ok=True)
    return COMMANDS[settings["command"]](settings)


def main(argv=None) -> int:
    try:
        settings = resolve(build_parser().parse_args(argv))
        return run(settings)
    except UsageError as exc:
        print(f"spacelike: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotASolution as exc:
        print(f"spacelike: refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpacelikeError, ValueError, KeyError, OSError) as exc:
        print(f"spacelike: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

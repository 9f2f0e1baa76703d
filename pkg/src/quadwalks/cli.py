"""Command line interface.

Every command prints a JSON report (sorted keys, 15 significant digits)
to stdout or to ``--out``, and can write a CSV side product with
``--csv``.  Exit status is 0 on success, 2 on invalid input or a domain
error, and 1 on any other failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import DomainError

CONFIG_KEYS = {"Dmax": int, "tol": float, "pole_threshold": float}


class ValidationError(DomainError):
    """A flag or config value failed validation."""


# ---------------------------------------------------------------------------
# option helpers


def read_config(path: str | None) -> dict:
    """Parse a plain ``key = value`` file (``#`` comments allowed)."""
    from .continuation import POLE_THRESHOLD
    from .group import DMAX, RATIO_TOL

    cfg = {"Dmax": DMAX, "tol": RATIO_TOL, "pole_threshold": POLE_THRESHOLD}
    if not path:
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_string("[config]\n" + fh.read())
    except OSError as exc:
        raise ValidationError(f"--config: cannot read {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ValidationError(f"--config: {exc}") from None
    for key, raw in parser["config"].items():
        if key not in CONFIG_KEYS:
            raise ValidationError(f"--config: unknown key {key!r} (expected one of {', '.join(CONFIG_KEYS)})")
        try:
            cfg[key] = CONFIG_KEYS[key](raw)
        except ValueError:
            raise ValidationError(f"--config: {key} = {raw!r} is not a valid {CONFIG_KEYS[key].__name__}") from None
    if cfg["Dmax"] < 1 or cfg["tol"] <= 0 or cfg["pole_threshold"] <= 0:
        raise ValidationError("--config: Dmax, tol and pole_threshold must be positive")
    return cfg


def _model(args):
    from .kernel import parse_stepset

    if args.model is None:
        raise ValidationError("--model is required")
    return parse_stepset(args.model)


def _weight(args, S):
    if args.z is None:
        raise ValidationError("--z is required")
    if not 0 < args.z < 1 / S.size:
        raise ValidationError(f"--z must lie in (0, 1/{S.size}) for this model (got {args.z})")
    return args.z


def _jobs(args) -> int:
    j = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    if j < 1:
        raise ValidationError(f"--jobs must be >= 1 (got {j})")
    return j


def _model_block(S) -> dict:
    return {"mask": S.mask, "steps": [list(s) for s in S.sorted_steps()], "descriptor": str(S)}


def _write(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(args, text: str):
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands


def _classify_one(item):
    S, rep_mask = item
    from .group import group_report
    from .kernel import covariance, is_singular

    row = {**_model_block(S), "class_mask": rep_mask, "covariance": covariance(S).full}
    if is_singular(S):
        row.update(singular=True, group_order=None, verdict="Singular", ratio=None)
        return row
    g = group_report(S, 1.0 / (2 * S.size))
    row.update(singular=False, group_order=g.order, verdict=g.verdict, ratio=g.ratio)
    return row


def cmd_classify(args, cfg) -> dict:
    """Singularity, group order and verdict for a batch of models."""
    from .kernel import parse_stepset
    from .models import all_models, model_classes

    if args.model:
        models = [parse_stepset(m) for m in args.model]
    elif args.raw:
        models = all_models()
    else:
        models = model_classes()
    items = [(S, min(S.mask, S.transpose().mask)) for S in models]
    jobs = _jobs(args)
    if jobs == 1:
        rows = [_classify_one(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_classify_one, items))
    orders: dict = {}
    for r in rows:
        if not r["singular"]:
            orders[str(r["group_order"])] = orders.get(str(r["group_order"]), 0) + 1
    summary = {
        "probed": len(rows),
        "singular": sum(r["singular"] for r in rows),
        "finite_group": sum(not r["singular"] and r["group_order"] != "Infinite" for r in rows),
        "infinite_group": sum(not r["singular"] and r["group_order"] == "Infinite" for r in rows),
        "by_order": orders,
    }
    from .report import csv_text

    header = ("mask", "steps", "class_mask", "singular", "group_order", "covariance", "ratio", "verdict")
    _write_csv(args, csv_text(header, ([r["mask"], r["descriptor"], r["class_mask"], int(r["singular"]),
                                        r["group_order"] or "", r["covariance"],
                                        "" if r["ratio"] is None else r["ratio"], r["verdict"]] for r in rows)))
    return {"command": "classify", "models": rows, "summary": summary}


def cmd_periods(args, cfg) -> dict:
    """Branch points and periods by both routes."""
    from .elliptic import periods_closed_form, periods_quadrature
    from .kernel import branch_points, kernel_data

    S = _model(args)
    z = _weight(args, S)
    K = kernel_data(S, z)
    B = branch_points(K)
    cf = periods_closed_form(K, B)
    out = {"command": "periods", "model": _model_block(S), "z": z,
           "branch_points": {"x": list(B.x), "y": list(B.y)}, "closed_form": cf, "ratio": cf.ratio}
    if not args.no_quadrature:
        q = periods_quadrature(K, B)
        out["quadrature"] = q
        out["route_agreement"] = max(
            abs(q.omega2 - cf.omega2) / abs(cf.omega2),
            abs(q.omega3 - cf.omega3) / max(abs(cf.omega3), 1e-300),
            abs(q.omega1 - cf.omega1) / abs(cf.omega1),
        )
    return out


def cmd_count(args, cfg) -> dict:
    """Exact walk counts up to length N."""
    from .counting import count_walks, counts_csv, tail_bound

    if args.N < 0:
        raise ValidationError(f"--N must be >= 0 (got {args.N})")
    S = _model(args)
    T = count_walks(S, args.N)
    out = {"command": "count", "model": _model_block(S), "N": args.N,
           "totals": [str(T.total(n)) for n in range(args.N + 1)],
           "excursions": [str(T.q(0, 0, n)) for n in range(args.N + 1)]}
    if args.z is not None:
        out["z"] = _weight(args, S)
        out["tail_bound"] = tail_bound(S, args.z, args.N)
    _write_csv(args, counts_csv(T))
    return out


def cmd_group(args, cfg) -> dict:
    """Group order, period ratio, rationality and verdict."""
    from .group import Rational, group_report

    S = _model(args)
    z = _weight(args, S)
    g = group_report(S, z, Dmax=cfg["Dmax"], tol=cfg["tol"])
    rat = g.rationality
    rat_block = {"kind": type(rat).__name__, "Dmax": rat.Dmax, "tol": rat.tol}
    if isinstance(rat, Rational):
        rat_block.update(value=str(rat), residual=rat.residual)
    return {"command": "group", "model": _model_block(S), "z": z, "group_order": g.order, "ratio": g.ratio,
            "rationality": rat_block, "covariance": g.covariance, "orbit_sum_zero": g.orbit_sum_zero,
            "verdict": g.verdict}


def cmd_continue(args, cfg) -> dict:
    """Subcase, special points and pole-curve checks for an infinite-group model."""
    from .continuation import (
        Continuation,
        first_branch_singularity_check,
        lift_special_points,
        pole_curve_suite,
        pole_samples_csv,
        second_branch_pole_count,
    )
    from .errors import RationalRatio
    from .group import Rational, ratio_rationality
    from .kernel import kernel_data

    S = _model(args)
    z = _weight(args, S)
    if args.N < 0:
        raise ValidationError(f"--N must be >= 0 (got {args.N})")
    if args.n_max < 1 or args.grid < 2:
        raise ValidationError("--n-max must be >= 1 and --grid >= 2")
    L = Continuation(kernel_data(S, z), args.N)
    if isinstance(ratio_rationality(L.w2 / L.w3, cfg["Dmax"], cfg["tol"]), Rational):
        raise RationalRatio(f"omega2/omega3 = {L.w2 / L.w3:.15g} is rational at this tolerance")
    U = L.U
    pts = lift_special_points(U)
    suite = pole_curve_suite(L, args.n_max, threshold=cfg["pole_threshold"])
    rng = np.random.default_rng(args.seed)
    probe = rng.uniform(0, 1, 20) * U.w1 + rng.uniform(-2, 3, 20) * U.w2
    res = L.residual(probe)
    res = res[np.isfinite(res)]
    _write_csv(args, pole_samples_csv(suite))
    return {
        "command": "continue", "model": _model_block(S), "z": z, "N": args.N,
        "tail_bound": L.tail,
        "subcase": suite.subcase,
        "special_points": {k: {"omega": w, "x": complex(U.x(w)), "y": complex(U.y(w))} for k, w in pts.items()},
        "pole_curves": {
            "fraction": suite.fraction, "tol": suite.tol,
            "samples": [{"source": m.source, "curve_x": m.curve_x, "fraction_verified": m.fraction_verified,
                         "max_distance": float(np.max(m.distance_x))} for m in suite.samples],
        },
        "first_branch": first_branch_singularity_check(L, args.grid, threshold=cfg["pole_threshold"]),
        "second_branch_poles": {str(g): second_branch_pole_count(L, g) for g in (args.grid // 2, args.grid)},
        "functional_equation_residual": float(res.max()) if res.size else None,
    }


def _scan_one(item):
    from .group import asymptotic_scan

    S, zmin, zmax, npts, qmax = item
    fit = asymptotic_scan(S, zmin=zmin, zmax=zmax, npts=npts, qmax=qmax)
    return S, fit


def cmd_scan(args, cfg) -> dict:
    """Small-z fit ``ratio ~ L + L_tilde / ln z`` for one model or all 51."""
    from .models import infinite_group_models
    from .report import csv_text

    if not 0 < args.zmin < args.zmax:
        raise ValidationError(f"need 0 < --zmin < --zmax (got {args.zmin}, {args.zmax})")
    if args.npts < 4:
        raise ValidationError(f"--npts must be >= 4 (got {args.npts})")
    models = infinite_group_models() if args.all else [_model(args)]
    for S in models:
        if args.zmax >= 1 / S.size:
            raise ValidationError(f"--zmax must be below 1/{S.size} for {S}")
    items = [(S, args.zmin, args.zmax, args.npts, args.qmax) for S in models]
    jobs = _jobs(args)
    if jobs == 1 or len(items) == 1:
        results = [_scan_one(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_scan_one, items))
    fits = []
    rows = []
    for S, f in results:
        fits.append({"model": _model_block(S), "L": f.L, "L_tilde": f.L_tilde, "residual": f.residual,
                     "L_snap": f.L_snap, "snap_residual": f.snap_residual})
        rows.extend((S.mask, z, r) for z, r in zip(f.z_grid, f.ratios))
    _write_csv(args, csv_text(("mask", "z", "ratio"), rows))
    out = {"command": "scan", "zmin": args.zmin, "zmax": args.zmax, "npts": args.npts, "fits": fits}
    if len(fits) == 1:
        out.update({k: fits[0][k] for k in ("L", "L_tilde", "L_snap")})
    return out


COMMANDS = {
    "classify": cmd_classify,
    "periods": cmd_periods,
    "count": cmd_count,
    "group": cmd_group,
    "continue": cmd_continue,
    "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadwalks", description="Quarter-plane walks with small steps.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with Dmax, tol, pole_threshold")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--csv", help="write the tabular side product here")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="taxonomy of the models")
    c.add_argument("--model", action="append", help="probe only these models (repeatable)")
    c.add_argument("--raw", action="store_true", help="probe every non-excluded set, not one per class")

    for name, helptext in (("periods", "branch points and periods"), ("group", "group order and verdict")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--model", required=True, help="step list like '1,0;-1,0;0,1;0,-1' or an 8-bit mask")
        c.add_argument("--z", type=float, required=True, help="weight in (0, 1/|S|)")
        if name == "periods":
            c.add_argument("--no-quadrature", action="store_true", help="skip the quadrature route")

    c = sub.add_parser("count", parents=[common], help="exact walk counts")
    c.add_argument("--model", required=True, help="step list like '1,0;-1,0;0,1;0,-1' or an 8-bit mask")
    c.add_argument("--N", type=int, default=20, help="largest walk length")
    c.add_argument("--z", type=float, default=None, help="also report the tail bound at this weight")

    c = sub.add_parser("continue", parents=[common], help="continuation and pole curves")
    c.add_argument("--model", required=True, help="step list like '1,0;-1,0;0,1;0,-1' or an 8-bit mask")
    c.add_argument("--z", type=float, required=True, help="weight in (0, 1/|S|)")
    c.add_argument("--N", type=int, default=60, help="series length for the seeds")
    c.add_argument("--n-max", type=int, default=200, help="orbit length for pole sampling")
    c.add_argument("--grid", type=int, default=40, help="grid size for the second-branch pole search")
    c.add_argument("--seed", type=int, default=0, help="RNG seed for the residual points")

    c = sub.add_parser("scan", parents=[common], help="small-z fit of omega2/omega3")
    c.add_argument("--model", help="step list like '1,0;-1,0;0,1;0,-1' or an 8-bit mask")
    c.add_argument("--all", action="store_true", help="all infinite-group classes")
    c.add_argument("--zmin", type=float, default=1e-6, help="smallest weight of the grid")
    c.add_argument("--zmax", type=float, default=1e-3, help="largest weight of the grid")
    c.add_argument("--npts", type=int, default=13, help="number of grid weights")
    c.add_argument("--qmax", type=int, default=12, help="largest denominator for snapping L")
    return p


def _glue_model_values(argv):
    """Join ``--model -1,0;...`` into one token; argparse would read it as a flag."""
    out = []
    it = iter(argv)
    for a in it:
        if a == "--model":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--model={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_model_values(argv))
    from .report import dumps

    try:
        cfg = read_config(args.config)
        payload = COMMANDS[args.command](args, cfg)
        _write(args, dumps(payload))
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001 - report and map to exit status 1
        traceback.print_exc()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: ``metricroom <command> ...``.

Domains are given as ``gallery.json#name``, as ``#name`` (or a bare name)
for an entry of the built-in gallery, or as inline JSON in the gallery
domain schema.  Points are ``x,y``.  The work-pool size comes from
``METRICROOM_WORKERS``.  The exit code is 0 on success, 1 when a
verification has hard failures and 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import MetricRoomError
from .geometry import (boundary_distance, boundary_sample, contains, domain_from_dict, domain_to_dict,
                       has_connected_boundary, is_bounded, is_simply_connected, nearest_boundary_point)

log = logging.getLogger("metricroom")


# ----------------------------------------------------------------------
# argument parsing helpers
# ----------------------------------------------------------------------

def parse_point(s: str) -> complex:
    try:
        x, y = (float(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {s!r}") from None
    return complex(x, y)


def parse_floats(s: str) -> tuple:
    try:
        return tuple(float(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers but got {s!r}") from None


def parse_domain(text: str):
    """Resolve a domain argument (see the module docstring)."""
    from .verify import default_gallery, load_gallery

    text = text.strip()
    if text.startswith("{"):
        return domain_from_dict(json.loads(text))
    path, _, name = text.rpartition("#")
    entries = load_gallery(path)[0] if path else default_gallery()[0]
    for e in entries:
        if e.name == name:
            return e.domain
    raise SystemExit(f"error: no gallery entry named {name!r}; known: {', '.join(e.name for e in entries)}")


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pt(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _config(args, **overrides):
    from .verify import load_config

    cfg = load_config(getattr(args, "config", None), **overrides)
    grid = getattr(args, "grid", None)
    if grid:
        from dataclasses import replace
        cfg = replace(cfg, solver=replace(cfg.solver, grid=grid))
    budget = getattr(args, "budget", None)
    if budget:
        from dataclasses import replace
        if len(budget) != 3:
            raise SystemExit("error: --budget takes coarse_pairs,refine_iters,simplex_tolerance")
        cfg = replace(cfg, budget=replace(cfg.budget, coarse_pairs=int(budget[0]), refine_iters=int(budget[1]),
                                          simplex_tolerance=budget[2]))
    return cfg


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import default_gallery, dumps_report, hard_failures, load_gallery, run_suite

    cfg = _config(args, slack=args.slack, strict=args.strict or None)
    entries, nested = load_gallery(args.gallery) if args.gallery else default_gallery()
    report = run_suite(entries, nested, cfg)
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    s = report["summary"]
    for cid, c in s["by_check"].items():
        print(f"{cid:9s} pass {c['pass']:4d}  marginal {c['marginal']:3d}  fail {c['fail']:3d}  "
              f"uncomputable {c['uncomputable']:3d}")
    n = hard_failures(report)
    print(f"hard failures: {n}")
    return 1 if n else 0


def cmd_converge(args) -> int:
    from .verify import converge_suite, dumps_report, hard_failures

    report = converge_suite(None, _config(args))
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    for c in report["cases"]:
        print(f"{c['kind']:11s} {'pass' if c['passed'] else 'FAIL'}")
    n = hard_failures(report)
    print(f"failed cases: {n}")
    return 1 if n else 0


def cmd_sweep(args) -> int:
    import csv

    from .verify import sweep

    rows = sweep(parse_domain(args.domain), args.bbox, [int(v) for v in args.shape], args.metric, _config(args),
                 args.exclusion)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump({"metric": args.metric, "rows": [list(r) for r in rows]}, fh)
            fh.write("\n")
        else:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value", "error"])
            w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    log.info("%d rows", len(rows))
    return 0


def cmd_eval(args) -> int:
    from .verify import evaluate_row

    _emit(evaluate_row(parse_domain(args.domain), args.point, _config(args)), args.out)
    return 0


def cmd_solve(args) -> int:
    from .liouville import SolverConfig, solve_density
    from .liouville.fieldio import dump_csv, write_field

    cfg = SolverConfig(grid=args.grid, n_theta=args.n_theta, nested=not args.no_nested)
    field = solve_density(parse_domain(args.domain), cfg)
    summary = {"grids": len(field.grids), "unknowns": int(field.x.size), "residual": field.convergence_residual,
               "estimated_error": field.estimated_discretization_error, "newton_history": field.residual_history}
    if args.out:
        write_field(field, args.out)
        summary["out"] = args.out
    if args.dump_csv:
        summary["csv_rows"] = dump_csv(field, args.dump_csv)
        summary["csv"] = args.dump_csv
    _emit(summary)
    return 0


def cmd_hurwitz(args) -> int:
    from .geometry import punctured
    from .hurwitz import hurwitz_extract, hurwitz_general
    from .liouville import solve_density

    dom = parse_domain(args.domain)
    cfg = _config(args)
    if args.radii:
        if not contains(dom, args.point):
            raise MetricRoomError(f"{args.point} is not in the domain")
        est = hurwitz_extract(solve_density(punctured(dom, args.point), cfg.solver), args.point, args.radii)
    else:
        est = hurwitz_general(dom, args.point, cfg.solver)
    out = est.to_dict()
    out["error"] = est.relative_error * est.value
    _emit(out)
    return 0


def cmd_etabar(args) -> int:
    from .barmetrics import eta_bar

    _emit(eta_bar(parse_domain(args.domain), args.point, _config(args).budget).to_dict())
    return 0


def cmd_kappa(args) -> int:
    from .barmetrics import kappa

    _emit(kappa(parse_domain(args.domain), args.point, _config(args).budget).to_dict())
    return 0


def cmd_lambda01(args) -> int:
    from .modular import density_C01, inverse_lambda

    w = args.point
    tau = inverse_lambda(w).value
    _emit({"point": _pt(w), "density": float(density_C01(w)), "tau": _pt(tau)})
    return 0


def cmd_constants(args) -> int:
    from .modular import PRINTED_K, constant_K, density_C01

    K = constant_K()
    _emit({"K": K, "K_printed": PRINTED_K, "K_over_4": K / 4, "K_printed_over_4": PRINTED_K / 4,
           "lambda01_at_minus_1": float(density_C01(-1.0)), "discrepancy": PRINTED_K - K})
    return 0


def cmd_geom(args) -> int:
    if args.action == "gallery":
        from .verify import default_gallery, gallery_to_dict
        _emit(gallery_to_dict(*default_gallery()), args.out)
        return 0
    if not args.domain:
        raise SystemExit("error: --domain is required")
    dom = parse_domain(args.domain)
    if args.action == "sample":
        _emit({"domain": domain_to_dict(dom), "boundary": [_pt(z) for z in boundary_sample(dom, args.n).as_array()]},
              args.out)
        return 0
    out = {"domain": domain_to_dict(dom), "bounded": is_bounded(dom), "simply_connected": is_simply_connected(dom),
           "connected_boundary": has_connected_boundary(dom)}
    if args.point is not None:
        w = args.point
        out["point"] = _pt(w)
        out["contains"] = contains(dom, w)
        if out["contains"]:
            out["delta"] = boundary_distance(dom, w)
            out["nearest_boundary_point"] = _pt(nearest_boundary_point(dom, w))
    _emit(out, args.out)
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metricroom", description="conformal densities on planar domains")
    ap.add_argument("--log-level", default="WARNING")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, domain=False, point=False, config=True, budget=False, grid=False):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        if domain:
            p.add_argument("--domain", required=True, help="gallery.json#name, #name or inline JSON")
        if point:
            p.add_argument("--point", type=parse_point, required=True, help="x,y")
        if config:
            p.add_argument("--config", help="JSON config file (solver, budget, slack, ...)")
        if budget:
            p.add_argument("--budget", type=parse_floats, help="coarse_pairs,refine_iters,simplex_tolerance")
        if grid:
            p.add_argument("--grid", type=int, help="nodes per side of the Cartesian grids")
        return p

    p = add("verify", cmd_verify, "run the inequality suite over a gallery", budget=True, grid=True)
    p.add_argument("--gallery", help="gallery JSON (default: built-in gallery)")
    p.add_argument("--slack", type=float, default=None)
    p.add_argument("--strict", action="store_true", help="also check with the printed value of K")
    p.add_argument("--out", help="report JSON path")

    p = add("converge", cmd_converge, "continuity, Hausdorff and lower-semicontinuity cases", budget=True, grid=True)
    p.add_argument("--out")

    p = add("sweep", cmd_sweep, "tabulate a density on a grid", domain=True, budget=True, grid=True)
    p.add_argument("--metric", default="lambda", choices=("delta", "quasihyperbolic", "lambda", "eta", "eta_bar",
                                                          "kappa"))
    p.add_argument("--bbox", type=parse_floats, required=True, help="x0,x1,y0,y1")
    p.add_argument("--shape", type=parse_floats, required=True, help="nx,ny")
    p.add_argument("--exclusion", type=float, default=0.0, help="skip points this close to the boundary")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = add("eval", cmd_eval, "all densities at one point", domain=True, point=True, budget=True, grid=True)
    p.add_argument("--out")

    p = add("solve", cmd_solve, "grid solve of the hyperbolic density", domain=True, config=False)
    p.add_argument("--grid", type=int, default=513)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--no-nested", action="store_true", help="skip the coarse solve and error estimate")
    p.add_argument("--out", help="binary field file")
    p.add_argument("--dump-csv", help="write x,y,lambda rows")

    p = add("hurwitz", cmd_hurwitz, "Hurwitz density at a point", domain=True, point=True, grid=True)
    p.add_argument("--radii", type=parse_floats, help="r1,r2,r3 extraction radii")

    add("etabar", cmd_etabar, "sup of twice punctured Hurwitz densities", domain=True, point=True, budget=True)
    add("kappa", cmd_kappa, "sup of twice punctured hyperbolic densities", domain=True, point=True, budget=True)
    add("lambda01", cmd_lambda01, "hyperbolic density of C minus {0,1}", point=True, config=False)
    add("constants", cmd_constants, "the constant K, computed and printed", config=False)

    p = add("geom", cmd_geom, "geometry queries", config=False)
    p.add_argument("action", choices=("info", "sample", "gallery"))
    p.add_argument("--domain")
    p.add_argument("--point", type=parse_point)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--out")
    return ap


_VALUE_FLAGS = ("--point", "--bbox", "--radii", "--budget", "--shape")


def _join_negative_values(argv):
    """``--point -1,0`` would read ``-1,0`` as an option; rewrite it as ``--point=-1,0``."""
    out, it = [], iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except MetricRoomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

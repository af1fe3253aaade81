"""Inequality harness over a gallery of domains.

A gallery is a JSON document::

    {"schema": "metricroom.gallery", "version": 1,
     "entries": [{"name": ..., "domain": {...}, "probes": [[x, y], ...],
                  "flags": {"simply_connected": ..., "connected_boundary": ...,
                            "uniformly_perfect": ..., "twice_punctured": ...},
                  "b": 0.5}, ...],
     "nested": [["inner name", "outer name"], ...]}

``domain`` uses the schema of :func:`metricroom.geometry.domain_to_dict`;
``b`` is a constant with ``lambda >= b/delta`` (required for uniformly
perfect entries).

Reports are JSON documents with ``schema = "metricroom.report"`` and an
integer ``version`` (currently 1).  A verification report holds one row per
(entry, probe) with the computed quantities and the checks applied to them;
every check records both compared numbers, the applied slack and a status
(``pass``, ``marginal``, ``fail`` or ``uncomputable``).  Reports contain no
timings, so the same gallery and configuration give byte-identical output.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .barmetrics import OptimizerBudget, delta_bar, eta_bar, kappa, lsc_probe
from .errors import InvalidDomain, MetricRoomError, ResolutionError
from .etatable import load_table, workers
from .geometry import (Annulus, Disk, ExteriorDisk, Polygon, PuncturedPlane, WithPunctures, base_of,
                       boundary_convergence_check, boundary_distance, boundary_sample, contains, domain_from_dict,
                       domain_to_dict, has_connected_boundary, hausdorff, is_simply_connected, punctures_of)
from .hurwitz import continuity_probe, hurwitz_general, hyperbolic_density
from .liouville import SolverConfig
from .modular import PRINTED_K, constant_K, hempel_lower_bound

__all__ = [
    "REPORT_VERSION", "GALLERY_VERSION", "GalleryEntry", "RunConfig", "CheckDef", "CHECKS",
    "default_gallery", "gallery_to_dict", "gallery_from_dict", "load_gallery", "save_gallery",
    "load_config", "evaluate_row", "run_suite", "default_converge_cases", "converge_suite", "sweep",
    "dumps_report", "hard_failures",
]

REPORT_VERSION = 1
GALLERY_VERSION = 1
FLAGS = ("simply_connected", "connected_boundary", "uniformly_perfect", "twice_punctured")


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Solver defaults, optimizer budget, slack and seed for a run.

    ``marginal_factor`` bounds the ratio up to which a check exceeding its
    slack is reported as marginal instead of failed.  Hurwitz extractions
    that need a finer grid than ``solver.grid`` are retried on doubled grids
    up to ``max_grid``.  ``strict`` re-runs the
    connected-boundary check with the printed value of ``K``.
    """

    solver: SolverConfig = SolverConfig(grid=257)
    budget: OptimizerBudget = OptimizerBudget()
    slack: float = 1.05
    marginal_factor: float = 2.0
    sharpness_tolerance: float = 0.04
    seed: int = 0
    strict: bool = False
    max_grid: int = 513

    def __post_init__(self):
        if self.slack < 1:
            raise ValueError("slack must be >= 1")

    def to_dict(self) -> dict:
        return {"solver": self.solver.to_dict(), "budget": self.budget.to_dict(), "slack": self.slack,
                "marginal_factor": self.marginal_factor, "sharpness_tolerance": self.sharpness_tolerance,
                "seed": self.seed, "strict": self.strict, "max_grid": self.max_grid}


def load_config(path=None, **overrides) -> RunConfig:
    """Read a JSON config (keys as in :meth:`RunConfig.to_dict`, all optional)."""
    d = {}
    if path:
        with open(path) as fh:
            d = json.load(fh)
    keys = ("slack", "marginal_factor", "sharpness_tolerance", "seed", "strict", "max_grid")
    unknown = set(d) - {"solver", "budget", *keys}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(
        solver=replace(RunConfig.solver, **d.get("solver", {})),
        budget=replace(RunConfig.budget, **d.get("budget", {})),
        **{k: d[k] for k in keys if k in d})
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


# ----------------------------------------------------------------------
# gallery
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GalleryEntry:
    name: str
    domain: object
    probes: tuple
    flags: dict
    b: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "probes", tuple(complex(p) for p in self.probes))
        missing = set(FLAGS) - set(self.flags)
        if missing:
            raise InvalidDomain(f"{self.name}: missing flags {sorted(missing)}")
        for p in self.probes:
            if not contains(self.domain, p):
                raise InvalidDomain(f"{self.name}: probe {p} is not in the domain")
        if self.flags["simply_connected"] != is_simply_connected(self.domain):
            raise InvalidDomain(f"{self.name}: simply_connected flag disagrees with the domain")
        if self.flags["connected_boundary"] != has_connected_boundary(self.domain):
            raise InvalidDomain(f"{self.name}: connected_boundary flag disagrees with the domain")
        two = base_of(self.domain) is None and len(punctures_of(self.domain)) == 2
        if self.flags["twice_punctured"] != two:
            raise InvalidDomain(f"{self.name}: twice_punctured flag disagrees with the domain")
        if self.flags["uniformly_perfect"] and not (self.b and self.b > 0):
            raise InvalidDomain(f"{self.name}: uniformly perfect entries need b > 0")

    def to_dict(self) -> dict:
        d = {"name": self.name, "domain": domain_to_dict(self.domain),
             "probes": [[p.real, p.imag] for p in self.probes], "flags": dict(self.flags)}
        if self.b is not None:
            d["b"] = self.b
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GalleryEntry":
        return cls(d["name"], domain_from_dict(d["domain"]), tuple(complex(x, y) for x, y in d["probes"]),
                   dict(d["flags"]), d.get("b"))


def _ring(radii, n, phase=0.0, center=0j):
    return [center + r * complex(math.cos(phase + 2 * math.pi * k / n), math.sin(phase + 2 * math.pi * k / n))
            for r in radii for k in range(n)]


#: probes shared by the twice and thrice punctured planes (at least 0.3 from 0, 1, i)
_PLANE_PROBES = (-1, -0.5 + 0.5j, 0.5, 0.5 + 0.4j, 0.5 - 0.5j, 2, 1.5j, -1j, 1 + 1j, -1 + 1j,
                 0.3 + 0.3j, 1.5 - 0.5j, 3 + 1j, -2 - 1j, 0.7 - 0.4j, -0.5 - 0.5j, 0.5 + 1.5j,
                 -0.4 + 1.2j, 2 + 2j, 1.4 + 0.4j)


def default_gallery() -> tuple[list, list]:
    """Six entries with 20 probes each, plus the nested pairs among them."""
    F = lambda sc, cb, up, tp: dict(zip(FLAGS, (sc, cb, up, tp)))  # noqa: E731
    sq = [complex(x, y) for x in (-0.3, -0.1, 0.1, 0.3) for y in (-0.4, -0.2, 0.0, 0.2, 0.4)]
    entries = [
        GalleryEntry("disk", Disk(0, 1), _ring((0.2, 0.45, 0.7, 0.9), 5, 0.3), F(True, True, True, False), 1.0),
        GalleryEntry("exterior_disk", ExteriorDisk(0, 1), _ring((1.4, 1.6, 2.5, 4.0), 5, 0.3),
                     F(False, True, False, False)),
        GalleryEntry("annulus", Annulus(0.5, 1), _ring((0.6, 0.7, 0.8, 0.9), 5, 0.3), F(False, False, True, False),
                     0.9),
        GalleryEntry("c01", PuncturedPlane((0, 1)), _PLANE_PROBES, F(False, False, False, True)),
        GalleryEntry("c01i", PuncturedPlane((0, 1, 1j)), _PLANE_PROBES, F(False, False, False, False)),
        GalleryEntry("square", Polygon((-0.5 - 0.5j, 0.5 - 0.5j, 0.5 + 0.5j, -0.5 + 0.5j)), sq,
                     F(True, True, True, False), 0.5),
    ]
    nested = [("square", "disk"), ("annulus", "disk"), ("c01i", "c01")]
    return entries, nested


def gallery_to_dict(entries, nested=()) -> dict:
    return {"schema": "metricroom.gallery", "version": GALLERY_VERSION,
            "entries": [e.to_dict() for e in entries], "nested": [list(p) for p in nested]}


def gallery_from_dict(d: dict) -> tuple[list, list]:
    if d.get("version", GALLERY_VERSION) != GALLERY_VERSION:
        raise ValueError("unsupported gallery version")
    entries = [GalleryEntry.from_dict(e) for e in d["entries"]]
    names = {e.name for e in entries}
    if len(names) != len(entries):
        raise ValueError("gallery names must be unique")
    nested = [tuple(p) for p in d.get("nested", [])]
    for a, b in nested:
        if a not in names or b not in names:
            raise ValueError(f"nested pair ({a}, {b}) names an unknown entry")
    return entries, nested


def load_gallery(path) -> tuple[list, list]:
    with open(path) as fh:
        return gallery_from_dict(json.load(fh))


def save_gallery(path, entries, nested=()) -> None:
    with open(path, "w") as fh:
        json.dump(gallery_to_dict(entries, nested), fh, indent=1)


# ----------------------------------------------------------------------
# rows
# ----------------------------------------------------------------------

def _quantity(fn):
    try:
        return fn(), None
    except MetricRoomError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def evaluate_row(domain, w, cfg: RunConfig) -> dict:
    """All densities at ``w`` with their error estimates; failures are recorded, not raised."""
    w = complex(w)
    out = {"point": [w.real, w.imag], "errors": {}}

    def put(name, fn):
        val, err = _quantity(fn)
        out[name] = val
        if err:
            out["errors"][name] = err

    put("delta", lambda: boundary_distance(domain, w))

    def lam():
        v, e = hyperbolic_density(domain, w, cfg.solver)
        return {"value": float(v), "error": float(e)}

    def eta():
        solver = cfg.solver
        while True:
            try:
                est = hurwitz_general(domain, w, solver)
                break
            except ResolutionError:
                if 2 * solver.grid - 1 > cfg.max_grid:
                    raise
                solver = replace(solver, grid=2 * solver.grid - 1)
        return {"value": est.value, "error": est.relative_error, "source": est.source, "grid": solver.grid}

    def ebar():
        r = eta_bar(domain, w, cfg.budget)
        a, b = r.argmax_pair
        return {"value": r.value, "error": r.error, "lower": r.lower, "upper": r.upper,
                "argmax_pair": [[a.real, a.imag], [b.real, b.imag]], "argmax_location": r.argmax_location,
                "evaluations": r.evaluations, "attainment_residual": r.attainment_residual}

    def kap():
        r = kappa(domain, w, cfg.budget)
        a, b = r.argmax_pair
        return {"value": r.value, "argmax_pair": [[a.real, a.imag], [b.real, b.imag]]}

    put("lambda", lam)
    put("eta", eta)
    put("eta_bar", ebar)
    put("kappa", kap)
    put("delta_bar", lambda: delta_bar(domain, w, cfg.budget))
    return out


def _row_job(args):
    d, w, cfg = args
    return evaluate_row(domain_from_dict(d), w, cfg)


def _map(fn, jobs):
    n = workers()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


# ----------------------------------------------------------------------
# checks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CheckDef:
    """A check: ``compare(row, entry, ctx)`` returns ``(lhs, rhs, kind, label)`` tuples.

    ``kind`` is ``"le"`` (``lhs <= slack * rhs``) or ``"eq:<tol>"``
    (``|lhs - rhs| <= tol * |rhs|``, or absolute when ``tol`` ends in ``a``).
    """

    id: str
    anchor: str
    applies: tuple
    compare: object


def _v(row, key):
    q = row.get(key)
    if q is None:
        raise KeyError(key)
    return q["value"] if isinstance(q, dict) else q


def _c1(row, e, ctx):
    return [(_v(row, "eta_bar"), _v(row, "eta"), "le", "eta_bar <= eta")]


def _c2(row, e, ctx):
    d = _v(row, "delta")
    return [(1 / (8 * d), _v(row, "eta_bar"), "le", "1/(8 delta) <= eta_bar"),
            (_v(row, "eta_bar"), 2 / d, "le", "eta_bar <= 2/delta")]


def _c3(row, e, ctx):
    return [(_v(row, "eta") / 16, _v(row, "eta_bar"), "le", "eta/16 <= eta_bar")]


def _c4(row, e, ctx):
    return [(_v(row, "eta_bar"), _v(row, "eta"), f"eq:{ctx['sharpness_tolerance']}", "eta_bar == eta")]


def _c5(row, e, ctx):
    return [(_v(row, "eta"), ctx["K"] / 4 * _v(row, "eta_bar"), "le", "eta <= (K/4) eta_bar")]


def _c6(row, e, ctx):
    return [(_v(row, "lambda"), _v(row, "eta"), "le", "lambda <= eta")]


def _c7(row, e, ctx):
    d = _v(row, "delta")
    return [(e.b / d, _v(row, "lambda"), "le", "b/delta <= lambda"),
            (_v(row, "lambda"), 2 / d, "le", "lambda <= 2/delta")]


def _c8(row, e, ctx):
    lam, eb = _v(row, "lambda"), _v(row, "eta_bar")
    return [(lam / 16, eb, "le", "lambda/16 <= eta_bar"),
            (eb, 2 / e.b * lam, "le", "eta_bar <= (2/b) lambda")]


def _c9(row, e, ctx):
    p, q = punctures_of(e.domain)
    w = complex(*row["point"])
    t = (w - p) / (q - p)
    return [(float(hempel_lower_bound(t)) / abs(q - p), _v(row, "lambda"), "le", "Hempel bound <= lambda")]


def _c10(row, e, ctx):
    return [(_v(row, "delta_bar"), 1 / _v(row, "delta"), f"eq:{ctx['simplex_tolerance']}a", "delta_bar == 1/delta")]


CHECKS = (
    CheckDef("C1", "eta_bar <= eta", (), _c1),
    CheckDef("C2", "1/(8 delta) <= eta_bar <= 2/delta", (), _c2),
    CheckDef("C3", "eta/16 <= eta_bar", (), _c3),
    CheckDef("C4", "eta_bar == eta on twice punctured planes", ("twice_punctured",), _c4),
    CheckDef("C5", "eta <= (K/4) eta_bar on domains with connected boundary", ("connected_boundary",), _c5),
    CheckDef("C6", "lambda <= eta", (), _c6),
    CheckDef("C7", "b/delta <= lambda <= 2/delta on uniformly perfect domains", ("uniformly_perfect",), _c7),
    CheckDef("C8", "lambda and eta_bar bi-Lipschitz with constants 1/16 and 2/b", ("uniformly_perfect",), _c8),
    CheckDef("C9", "Hempel lower bound for the twice punctured plane", ("twice_punctured",), _c9),
    CheckDef("C10", "delta_bar == 1/delta", (), _c10),
)
C11_ANCHOR = "domain monotonicity of eta and eta_bar on nested domains"


def _status(lhs, rhs, kind, cfg: RunConfig):
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return "uncomputable", float("nan"), float("nan")
    if kind == "le":
        ratio = lhs / rhs if rhs > 0 else math.inf
        if ratio <= cfg.slack:
            return "pass", ratio, cfg.slack
        return ("marginal" if ratio <= max(cfg.marginal_factor, cfg.slack) else "fail"), ratio, cfg.slack
    tol = kind.split(":", 1)[1]
    absolute = tol.endswith("a")
    tol = float(tol.rstrip("a"))
    dev = abs(lhs - rhs) / (1.0 if absolute else abs(rhs))
    if dev <= tol:
        return "pass", dev, tol
    return ("marginal" if dev <= cfg.marginal_factor * tol else "fail"), dev, tol


def _apply(check_id, anchor, comps_fn, cfg):
    try:
        comps = comps_fn()
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        return [{"id": check_id, "anchor": anchor, "status": "uncomputable", "reason": f"missing {exc}"}]
    out = []
    for lhs, rhs, kind, label in comps:
        st, measure, allowed = _status(float(lhs), float(rhs), kind, cfg)
        out.append({"id": check_id, "anchor": anchor, "label": label, "lhs": float(lhs), "rhs": float(rhs),
                    "kind": kind.split(":")[0], "measure": measure, "allowed": allowed, "status": st})
    return out


def _checks_for(entry: GalleryEntry, row: dict, cfg: RunConfig, ctx: dict) -> list:
    out = []
    for c in CHECKS:
        if any(not entry.flags[f] for f in c.applies):
            continue
        out += _apply(c.id, c.anchor, lambda c=c: c.compare(row, entry, ctx), cfg)
        if c.id == "C5" and cfg.strict:
            sctx = dict(ctx, K=PRINTED_K)
            out += [dict(r, id="C5-strict") for r in
                    _apply(c.id, c.anchor, lambda c=c: c.compare(row, entry, sctx), cfg)]
    return out


# ----------------------------------------------------------------------
# the suite
# ----------------------------------------------------------------------

def _summary(rows_checks) -> dict:
    counts = {"pass": 0, "marginal": 0, "fail": 0, "uncomputable": 0}
    by_check: dict = {}
    for ch in rows_checks:
        counts[ch["status"]] += 1
        b = by_check.setdefault(ch["id"], {"pass": 0, "marginal": 0, "fail": 0, "uncomputable": 0})
        b[ch["status"]] += 1
    return {"counts": counts, "by_check": dict(sorted(by_check.items(), key=lambda kv: _check_key(kv[0])))}


def _check_key(cid):
    num = cid[1:].split("-")[0]
    return (int(num) if num.isdigit() else 99, cid)


def run_suite(entries, nested=(), cfg: RunConfig = RunConfig()) -> dict:
    """Evaluate every probe of every entry and apply the checks C1 to C11."""
    if not entries:
        raise ValueError("gallery is empty")
    ctx = {"K": constant_K(), "sharpness_tolerance": cfg.sharpness_tolerance,
           "simplex_tolerance": cfg.budget.simplex_tolerance}
    by_name = {e.name: e for e in entries}
    jobs = [(domain_to_dict(e.domain), p, cfg) for e in entries for p in e.probes]
    # nested pairs need the outer quantities at the inner probes
    extra = []
    for inner, outer in nested:
        o = by_name[outer]
        for p in by_name[inner].probes:
            if p not in o.probes and contains(o.domain, p):
                extra.append((domain_to_dict(o.domain), p, cfg))
    uniq = []
    seen = set()
    for j in jobs + extra:
        key = (json.dumps(j[0], sort_keys=True), j[1])
        if key not in seen:
            seen.add(key)
            uniq.append(j)
    results = _map(_row_job, uniq)
    table = {(json.dumps(j[0], sort_keys=True), j[1]): r for j, r in zip(uniq, results)}

    rows, all_checks, ratios = [], [], []
    for e in entries:
        dkey = json.dumps(domain_to_dict(e.domain), sort_keys=True)
        for p in e.probes:
            r = table[(dkey, p)]
            checks = _checks_for(e, r, cfg, ctx)
            all_checks += checks
            if r.get("kappa") and r.get("lambda"):
                ratios.append(r["kappa"]["value"] / r["lambda"]["value"])
            rows.append({"entry": e.name, **r, "checks": checks})
    nested_rows = []
    for inner, outer in nested:
        ei, eo = by_name[inner], by_name[outer]
        ki = json.dumps(domain_to_dict(ei.domain), sort_keys=True)
        ko = json.dumps(domain_to_dict(eo.domain), sort_keys=True)
        for p in ei.probes:
            if not contains(eo.domain, p):
                continue
            ri, ro = table[(ki, p)], table[(ko, p)]
            checks = []
            for key in ("eta", "eta_bar"):
                label = f"{key}[{outer}] <= {key}[{inner}]"
                checks += _apply("C11", C11_ANCHOR,
                                 lambda key=key, label=label: [(_v(ro, key), _v(ri, key), "le", label)], cfg)
            all_checks += checks
            nested_rows.append({"inner": inner, "outer": outer, "point": [p.real, p.imag], "checks": checks})
    table_meta = load_table()
    return {
        "schema": "metricroom.report", "version": REPORT_VERSION, "kind": "verify",
        "slack": cfg.slack, "seed": cfg.seed, "config": cfg.to_dict(),
        "constants": {"K": ctx["K"], "K_printed": PRINTED_K, "K_over_4": ctx["K"] / 4,
                      "K_printed_over_4": PRINTED_K / 4},
        "eta_table": {"config": table_meta.config, "error": table_meta.error},
        "gallery": gallery_to_dict(entries, nested),
        "rows": rows, "nested": nested_rows,
        "kappa_over_lambda": {"min": min(ratios), "max": max(ratios)} if ratios else None,
        "summary": _summary(all_checks),
    }


def hard_failures(report: dict) -> int:
    """Number of failed checks (``fail`` status) in a verify or converge report."""
    if report.get("kind") == "verify":
        return report["summary"]["counts"]["fail"]
    return sum(1 for c in report.get("cases", []) if not c.get("passed", False))


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True, allow_nan=True) + "\n"


# ----------------------------------------------------------------------
# convergence suite
# ----------------------------------------------------------------------

def default_converge_cases() -> list:
    """Continuity, lower-semicontinuity and Hausdorff cases."""
    n = range(1, 9)
    return [
        {"kind": "continuity", "domain": PuncturedPlane((0j,)), "point": 1,
         "sequence": [1 + 2.0 ** -j for j in range(16)],
         "exact": True},
        {"kind": "continuity", "domain": PuncturedPlane((0j, 1 + 0j)), "point": 0.5 + 0.5j,
         "sequence": [0.5 + 0.5j + 0.2 / 2 ** k for k in range(12)]},
        {"kind": "continuity", "domain": Disk(0, 1), "point": 0.3, "sequence": [0.3 + 0.3 / 2 ** k for k in range(10)]},
        {"kind": "continuity", "domain": Disk(0, 1), "point": 0.2, "sequence": [0.2] * 4},
        {"kind": "hausdorff", "domain": Disk(0, 1), "point": 0, "sequence": [0.5 / k for k in n]},
        {"kind": "hausdorff", "domain": WithPunctures(Disk(0, 1), (0.5j,)), "point": 0.1,
         "sequence": [0.1 + 0.1j / k for k in n]},
        {"kind": "boundary", "domains": [Disk(0, 1 + 1 / k) for k in n], "limit": Disk(0, 1)},
        {"kind": "lsc", "domain": PuncturedPlane((0j, 1 + 0j)), "point": -1,
         "sequence": [-1 + 1 / k for k in range(2, 10)]},
        {"kind": "lsc", "domain": Disk(0, 1), "point": 0.4, "sequence": [0.4] * 4},
        {"kind": "lsc", "domain": ExteriorDisk(0, 1), "point": 2, "sequence": [2 + 2.0 ** -k for k in range(1, 13)]},
    ]


def _case_point(z):
    z = complex(z)
    return [z.real, z.imag]


def converge_suite(cases=None, cfg: RunConfig = RunConfig()) -> dict:
    """Run continuity (``eta``), Hausdorff, convergence-in-boundary and LSC (``eta_bar``) cases."""
    cases = default_converge_cases() if cases is None else cases
    out = []
    for c in cases:
        kind = c["kind"]
        rec = {"kind": kind}
        try:
            if kind == "continuity":
                rep = continuity_probe(c["domain"], c["point"], c["sequence"], cfg.solver)
                rec.update(domain=domain_to_dict(c["domain"]), **{k: v for k, v in rep.to_dict().items()
                                                                 if k != "hausdorff"})
                if c.get("exact"):
                    w = complex(c["point"])
                    p = punctures_of(c["domain"])[0]
                    exact = [1 / (8 * abs(complex(z) - p)) for z in c["sequence"]]
                    got = [e.value for e in rep.estimates]
                    rec["exact_values"] = exact
                    rec["exact_match"] = got == exact and rep.eta.value == 1 / (8 * abs(w - p))
                    rec["passed"] = rep.passed and rec["exact_match"]
                else:
                    # deviations must fall below 1e-2 eta(w) along the tail
                    tail = rep.deviations[len(rep.deviations) // 2:]
                    rec["passed"] = rep.passed and all(d <= 1e-2 * rep.eta.value for d in tail)
            elif kind == "hausdorff":
                dom = c["domain"]
                B = boundary_sample(dom, 64).as_array()
                w = complex(c["point"])
                pairs = []
                for z in c["sequence"]:
                    z = complex(z)
                    pairs.append((float(hausdorff(np.append(B, z), np.append(B, w))), abs(z - w)))
                rec.update(domain=domain_to_dict(dom), point=_case_point(w),
                           sequence=[_case_point(z) for z in c["sequence"]],
                           hausdorff=[list(p) for p in pairs], passed=all(h == s for h, s in pairs))
            elif kind == "boundary":
                rep = boundary_convergence_check(c["domains"], c["limit"], c.get("tolerance", 0.2))
                rec.update(domains=[domain_to_dict(d) for d in c["domains"]], limit=domain_to_dict(c["limit"]),
                           hausdorff=rep.hausdorff, witness=None if rep.witness is None else _case_point(rep.witness),
                           reasons=rep.reasons, passed=rep.converges)
            elif kind == "lsc":
                rep = lsc_probe(c["domain"], c["point"], c["sequence"], cfg.budget, c.get("slack", 0.02))
                rec.update(domain=domain_to_dict(c["domain"]), **rep)
            else:
                raise ValueError(f"unknown case kind {kind!r}")
        except MetricRoomError as exc:
            rec.update(passed=False, error=f"{type(exc).__name__}: {exc}")
        out.append(rec)
    return {"schema": "metricroom.report", "version": REPORT_VERSION, "kind": "converge",
            "config": cfg.to_dict(), "cases": out,
            "summary": {"passed": sum(1 for r in out if r["passed"]), "total": len(out)}}


# ----------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------

METRICS = ("delta", "quasihyperbolic", "lambda", "eta", "eta_bar", "kappa")


def sweep(domain, bbox, shape, metric: str = "lambda", cfg: RunConfig = RunConfig(), exclusion: float = 0.0):
    """Values of ``metric`` on a regular grid over ``bbox = (x0, x1, y0, y1)``.

    Returns a list of ``(x, y, value, error)`` rows for the grid points that
    lie in the domain at distance more than ``exclusion`` from the boundary.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    x0, x1, y0, y1 = map(float, bbox)
    nx, ny = map(int, shape)
    rows = []
    for y in np.linspace(y0, y1, ny):
        for x in np.linspace(x0, x1, nx):
            w = complex(x, y)
            if not contains(domain, w):
                continue
            d = boundary_distance(domain, w)
            if d <= exclusion:
                continue
            if metric == "delta":
                v, e = d, 0.0
            elif metric == "quasihyperbolic":
                v, e = 1 / d, 0.0
            elif metric == "lambda":
                v, e = hyperbolic_density(domain, w, cfg.solver)
            elif metric == "eta":
                est = hurwitz_general(domain, w, cfg.solver)
                v, e = est.value, est.relative_error
            elif metric == "eta_bar":
                r = eta_bar(domain, w, cfg.budget)
                v, e = r.value, r.error
            else:
                v, e = kappa(domain, w, cfg.budget).value, 0.0
            rows.append((float(x), float(y), float(v), float(e)))
    return rows

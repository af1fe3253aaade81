import json
import math

import pytest

from metricroom.barmetrics import OptimizerBudget
from metricroom.errors import InvalidDomain
from metricroom.geometry import Annulus, Disk, ExteriorDisk, PuncturedPlane, boundary_distance
from metricroom.liouville import SolverConfig
from metricroom.modular import density_C01
from metricroom.verify import (CHECKS, FLAGS, GalleryEntry, RunConfig, _status, converge_suite,
                               default_converge_cases, default_gallery, dumps_report, gallery_from_dict,
                               gallery_to_dict, hard_failures, load_config, load_gallery, run_suite, save_gallery,
                               sweep)

SMALL = RunConfig(solver=SolverConfig(grid=257, n_theta=32),
                  budget=OptimizerBudget(coarse_pairs=8, refine_iters=20, rounds=1, n_boundary=32,
                                         n_interior=8, n_exterior=8))


def flags(sc=False, cb=False, up=False, tp=False):
    return dict(zip(FLAGS, (sc, cb, up, tp)))


# ----------------------------------------------------------------------
# gallery
# ----------------------------------------------------------------------

def test_default_gallery_shape():
    entries, nested = default_gallery()
    assert [e.name for e in entries] == ["disk", "exterior_disk", "annulus", "c01", "c01i", "square"]
    assert all(len(e.probes) == 20 for e in entries)
    assert all(len(set(e.probes)) == 20 for e in entries)
    names = {e.name for e in entries}
    assert all(a in names and b in names for a, b in nested)


def test_gallery_round_trip(tmp_path):
    entries, nested = default_gallery()
    path = tmp_path / "g.json"
    save_gallery(path, entries, nested)
    e2, n2 = load_gallery(path)
    assert gallery_to_dict(e2, n2) == gallery_to_dict(entries, nested)
    assert json.loads(path.read_text())["schema"] == "metricroom.gallery"


def test_gallery_entry_validation():
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", Disk(0, 1), [2], flags(True, True, True), 1.0)
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", Disk(0, 1), [0], flags(False, True, True), 1.0)
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", Annulus(0.5, 1), [0.7], flags(False, True, True), 0.9)
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", Disk(0, 1), [0], flags(True, True, True))
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", PuncturedPlane((0, 1)), [0.5], flags())
    with pytest.raises(InvalidDomain):
        GalleryEntry("x", Disk(0, 1), [0], {"simply_connected": True})


def test_gallery_from_dict_rejects_bad_input():
    d = gallery_to_dict(*default_gallery())
    with pytest.raises(ValueError):
        gallery_from_dict(dict(d, version=2))
    with pytest.raises(ValueError):
        gallery_from_dict(dict(d, nested=[["disk", "nowhere"]]))
    with pytest.raises(ValueError):
        gallery_from_dict(dict(d, entries=d["entries"] + d["entries"][:1]))


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"slack": 1.1, "solver": {"grid": 129}, "budget": {"coarse_pairs": 5}}))
    cfg = load_config(p, seed=3)
    assert cfg.slack == 1.1 and cfg.seed == 3
    assert cfg.solver.grid == 129 and cfg.budget.coarse_pairs == 5
    assert cfg.budget.refine_iters == RunConfig().budget.refine_iters
    assert load_config() == RunConfig()


def test_load_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"slak": 1.1}))
    with pytest.raises(ValueError):
        load_config(p)
    with pytest.raises(ValueError):
        RunConfig(slack=0.9)


# ----------------------------------------------------------------------
# status logic
# ----------------------------------------------------------------------

@pytest.mark.parametrize("lhs,rhs,status", [
    (1.0, 1.0, "pass"), (1.05, 1.0, "pass"), (1.2, 1.0, "marginal"), (2.0, 1.0, "marginal"),
    (2.1, 1.0, "fail"), (1.0, 0.0, "fail"), (math.nan, 1.0, "uncomputable"), (1.0, math.inf, "uncomputable"),
])
def test_status_le(lhs, rhs, status):
    assert _status(lhs, rhs, "le", RunConfig())[0] == status


@pytest.mark.parametrize("lhs,rhs,kind,status", [
    (1.03, 1.0, "eq:0.04", "pass"), (1.06, 1.0, "eq:0.04", "marginal"), (1.2, 1.0, "eq:0.04", "fail"),
    (1.0 + 1e-10, 1.0, "eq:1e-9a", "pass"), (1.0 + 1e-8, 1.0, "eq:1e-9a", "fail"),
])
def test_status_eq(lhs, rhs, kind, status):
    assert _status(lhs, rhs, kind, RunConfig())[0] == status


def test_check_ids_unique_and_ordered():
    ids = [c.id for c in CHECKS]
    assert ids == [f"C{i}" for i in range(1, 11)]
    assert all(set(c.applies) <= set(FLAGS) for c in CHECKS)


# ----------------------------------------------------------------------
# the suite on a small gallery
# ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_report():
    entries = [GalleryEntry("c01", PuncturedPlane((0, 1)), [0.5 + 0.4j, -1], flags(tp=True)),
               GalleryEntry("c01i", PuncturedPlane((0, 1, 1j)), [0.5 + 0.4j], flags())]
    return entries, run_suite(entries, [("c01i", "c01")], SMALL)


def test_report_structure(small_report):
    _, rep = small_report
    assert rep["schema"] == "metricroom.report" and rep["version"] == 1 and rep["kind"] == "verify"
    assert len(rep["rows"]) == 3
    assert rep["constants"]["K"] == pytest.approx(4.376879230452953, rel=1e-12)
    assert rep["constants"]["K_printed"] == 4.3859
    assert len(rep["nested"]) == 1
    counts = rep["summary"]["counts"]
    assert sum(counts.values()) == sum(len(r["checks"]) for r in rep["rows"]) + 2
    lo, hi = rep["kappa_over_lambda"]["min"], rep["kappa_over_lambda"]["max"]
    assert 0 < lo <= hi


def test_report_twice_punctured_rows(small_report):
    _, rep = small_report
    for row in rep["rows"][:2]:
        w = complex(*row["point"])
        # the twice punctured plane has a closed form for lambda and kappa
        assert row["lambda"]["value"] == pytest.approx(float(density_C01(w)), rel=1e-6)
        assert row["kappa"]["value"] == pytest.approx(float(density_C01(w)), rel=1e-9)
        assert row["delta"] == pytest.approx(boundary_distance(PuncturedPlane((0, 1)), w))
        ids = {c["id"] for c in row["checks"]}
        assert {"C1", "C2", "C3", "C4", "C6", "C9", "C10"} <= ids
        assert "C5" not in ids and "C7" not in ids
        assert all(c["status"] == "pass" for c in row["checks"]), row["checks"]
    assert hard_failures(rep) == 0


def test_no_slack_sanity(small_report):
    _, rep = small_report
    strict = RunConfig(slack=1.0)
    row = rep["rows"][0]
    tol = row["eta"]["error"] + row["eta_bar"]["error"]
    for c in row["checks"]:
        if c["id"] in ("C1", "C2", "C3", "C6"):
            assert c["lhs"] <= c["rhs"] * (1 + tol), c
            if tol == 0:
                assert _status(c["lhs"], c["rhs"], "le", strict)[0] == "pass"


def test_report_is_deterministic(small_report):
    entries, rep = small_report
    again = run_suite(entries, [("c01i", "c01")], SMALL)
    assert dumps_report(again) == dumps_report(rep)


def test_strict_mode_adds_check():
    e = GalleryEntry("disk", Disk(0, 1), [0.3], flags(True, True, True), 1.0)
    rep = run_suite([e], (), RunConfig(solver=SMALL.solver, budget=SMALL.budget, strict=True))
    ids = [c["id"] for c in rep["rows"][0]["checks"]]
    assert "C5" in ids and "C5-strict" in ids
    c5 = [c for c in rep["rows"][0]["checks"] if c["id"] == "C5"][0]
    assert c5["rhs"] == pytest.approx(4.376879230452953 / 4 * rep["rows"][0]["eta_bar"]["value"])


def test_run_suite_rejects_empty():
    with pytest.raises(ValueError):
        run_suite([])


# ----------------------------------------------------------------------
# convergence suite
# ----------------------------------------------------------------------

def test_converge_default_cases_shape():
    kinds = [c["kind"] for c in default_converge_cases()]
    assert {"continuity", "hausdorff", "boundary", "lsc"} == set(kinds)


def test_converge_suite_cheap_cases():
    cases = [c for c in default_converge_cases() if c["kind"] in ("hausdorff", "boundary", "lsc")]
    rep = converge_suite(cases, SMALL)
    assert rep["kind"] == "converge" and rep["summary"]["total"] == len(cases)
    assert all(c["passed"] for c in rep["cases"]), [c for c in rep["cases"] if not c["passed"]]
    for c in rep["cases"]:
        if c["kind"] == "hausdorff":
            assert all(h == s for h, s in c["hausdorff"])
    assert hard_failures(rep) == 0


def test_converge_closed_form_continuity():
    case = default_converge_cases()[0]
    rep = converge_suite([case], SMALL)
    c = rep["cases"][0]
    assert c["exact_match"] and c["passed"]


def test_converge_unknown_kind():
    with pytest.raises(ValueError):
        converge_suite([{"kind": "nope"}], SMALL)


# ----------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------

def test_sweep_delta_disk():
    rows = sweep(Disk(0, 1), (-1, 1, -1, 1), (21, 21), "delta")
    assert rows
    for x, y, v, e in rows:
        assert v == pytest.approx(1 - abs(complex(x, y)), abs=1e-12) and e == 0


def test_sweep_lambda_twice_punctured_plane():
    rows = sweep(PuncturedPlane((0, 1)), (-2, 3, -2, 2), (200, 160), "lambda")
    # the grid avoids 0 and 1 since neither coordinate list hits them exactly
    assert len(rows) == 32000
    assert all(math.isfinite(v) and v > 0 for _, _, v, _ in rows)
    x, y, v, _ = min(rows, key=lambda r: abs(complex(r[0], r[1]) + 1))
    assert v == pytest.approx(float(density_C01(complex(x, y))), rel=1e-12)


def test_sweep_exclusion_and_metric_check():
    rows = sweep(Disk(0, 1), (-1, 1, -1, 1), (11, 11), "quasihyperbolic", exclusion=0.5)
    assert all(1 / v > 0.5 for _, _, v, _ in rows)
    with pytest.raises(ValueError):
        sweep(Disk(0, 1), (-1, 1, -1, 1), (3, 3), "nope")


def test_sweep_eta_bar_exterior_disk_smoke():
    rows = sweep(ExteriorDisk(0, 1), (-3, 3, -3, 3), (5, 5), "eta_bar")
    assert len(rows) == 24
    assert all(math.isfinite(v) and v > 0 for _, _, v, _ in rows)

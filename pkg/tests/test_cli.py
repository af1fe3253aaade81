import csv
import json

import pytest

from metricroom.cli import _join_negative_values, main, parse_domain
from metricroom.geometry import Disk, PuncturedPlane, domain_to_dict
from metricroom.liouville.fieldio import read_field
from metricroom.modular import density_C01
from metricroom.verify import FLAGS, GalleryEntry, save_gallery


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_parse_domain_forms(tmp_path):
    assert parse_domain("#disk") == Disk(0, 1)
    assert parse_domain("disk") == Disk(0, 1)
    assert parse_domain(json.dumps(domain_to_dict(PuncturedPlane((0, 1))))) == PuncturedPlane((0, 1))
    g = tmp_path / "g.json"
    save_gallery(g, [GalleryEntry("d2", Disk(0, 2), [0], dict.fromkeys(FLAGS, False) | {
        "simply_connected": True, "connected_boundary": True})])
    assert parse_domain(f"{g}#d2") == Disk(0, 2)
    with pytest.raises(SystemExit):
        parse_domain("#nowhere")


def test_negative_values_are_joined():
    assert _join_negative_values(["lambda01", "--point", "-1,0"]) == ["lambda01", "--point=-1,0"]
    assert _join_negative_values(["x", "--point"]) == ["x", "--point"]


def test_constants(capsys):
    d = run_json(capsys, "constants")
    assert d["K"] == pytest.approx(4.376879230452953, rel=1e-12)
    assert d["K_printed"] == 4.3859
    assert d["lambda01_at_minus_1"] == pytest.approx(0.2284732905222, abs=1e-12)


def test_lambda01(capsys):
    d = run_json(capsys, "lambda01", "--point", "-1,0")
    assert d["density"] == pytest.approx(float(density_C01(-1)), rel=1e-14)
    assert d["tau"][1] > 0


def test_geom(capsys, tmp_path):
    d = run_json(capsys, "geom", "info", "--domain", "#annulus", "--point", "0.7,0")
    assert d["contains"] and d["delta"] == pytest.approx(0.2)
    assert not d["simply_connected"] and not d["connected_boundary"]
    d = run_json(capsys, "geom", "sample", "--domain", "#disk", "--n", "8")
    assert len(d["boundary"]) == 8
    out = tmp_path / "g.json"
    assert main(["geom", "gallery", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["entries"]) == 6


def test_etabar_and_kappa(capsys):
    d = run_json(capsys, "etabar", "--domain", "#c01", "--point", "0.5,0")
    assert d["value"] == pytest.approx(1.0, rel=0.01)
    d = run_json(capsys, "kappa", "--domain", "#c01", "--point", "-1,0", "--budget", "8,10,1e-9")
    assert d["value"] == pytest.approx(float(density_C01(-1)), rel=1e-9)


def test_hurwitz_closed_form(capsys):
    d = run_json(capsys, "hurwitz", "--domain", '{"type": "PuncturedPlane", "punctures": [[0, 0]]}',
                 "--point", "2,0")
    assert d["value"] == 1 / 16


def test_sweep_csv_and_json(capsys, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--domain", "#disk", "--metric", "delta", "--bbox", "-1,1,-1,1", "--shape", "5,5",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and all(float(r["value"]) == pytest.approx(1 - abs(complex(float(r["x"]), float(r["y"]))))
                        for r in rows)
    d = run_json(capsys, "sweep", "--domain", "#c01", "--metric", "lambda", "--bbox", "-2,3,-2,2",
                 "--shape", "4,3", "--format", "json")
    assert len(d["rows"]) == 12


def test_solve_writes_field_and_csv(capsys, tmp_path):
    f, c = tmp_path / "f.bin", tmp_path / "f.csv"
    d = run_json(capsys, "solve", "--domain", "#disk", "--grid", "65", "--n-theta", "16", "--no-nested",
                 "--out", str(f), "--dump-csv", str(c))
    assert d["residual"] < 1e-8 and d["csv_rows"] > 0
    assert read_field(f).x.size == d["unknowns"]
    rows = list(csv.reader(c.open()))
    assert len(rows) == d["csv_rows"] + 1


def test_verify_exit_codes(capsys, tmp_path):
    g = tmp_path / "g.json"
    flags = {"simply_connected": True, "connected_boundary": True, "uniformly_perfect": True,
             "twice_punctured": False}
    save_gallery(g, [GalleryEntry("disk", Disk(0, 1), [0], flags, 1.0)])
    out = tmp_path / "r.json"
    code, text = run(capsys, "verify", "--gallery", str(g), "--out", str(out), "--budget", "8,20,1e-9")
    rep = json.loads(out.read_text())
    # eta = 2 at the centre of the disk exceeds (K/4) eta_bar, so C5 is a hard failure
    assert code == 1 and rep["summary"]["by_check"]["C5"]["fail"] == 1
    assert "hard failures: 1" in text


def test_verify_passes_on_twice_punctured_plane(capsys, tmp_path):
    g = tmp_path / "g.json"
    flags = dict.fromkeys(FLAGS, False) | {"twice_punctured": True}
    save_gallery(g, [GalleryEntry("c01", PuncturedPlane((0, 1)), [0.5], flags)])
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"slack": 1.05, "budget": {"coarse_pairs": 8}}))
    code, text = run(capsys, "verify", "--gallery", str(g), "--config", str(cfg))
    assert code == 0 and "hard failures: 0" in text


def test_errors_exit_two(capsys):
    assert main(["hurwitz", "--domain", "#disk", "--point", "2,0", "--radii", "0.1,0.05,0.02"]) == 2
    assert "error" in capsys.readouterr().err

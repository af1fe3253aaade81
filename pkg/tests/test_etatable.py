import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from metricroom import etatable
from metricroom.errors import DegeneratePair, PunctureValue
from metricroom.etatable import (V_MAX, X_MAX, EtaTable, eta_C01, eta_two_punctures, fit, load_table, lobatto,
                                 tau_coordinates)
from metricroom.geometry import PuncturedPlane
from metricroom.hurwitz import hurwitz_general
from metricroom.liouville import SolverConfig

finite = st.floats(-4, 4, allow_nan=False)


def point(x, y):
    t = complex(x, y)
    assume(abs(t) > 1e-3 and abs(t - 1) > 1e-3)
    return t


def test_table_metadata():
    tab = load_table()
    assert tab.coeffs.shape == (len(tab.v_nodes), len(tab.x_nodes))
    assert 0 <= tab.error < 0.02
    assert tab.v_nodes[0] == 0 and tab.v_nodes[-1] == pytest.approx(V_MAX)


@pytest.mark.parametrize("t,exact", [(0.5, 1.0), (-1, 0.25), (2, 0.25)])
def test_exact_anchors(t, exact):
    # 1/2 is the midpoint of the two punctures; -1 and 2 are its anharmonic images
    assert eta_C01(t) == pytest.approx(exact, rel=0.01)


def test_once_punctured_limit():
    # 8|t| eta(t) -> 1 as t -> 0, but only at the rate 1/log(1/|t|)
    for u in (1, -1, 1j):
        ratios = [8 * r * eta_C01(u * r) for r in (1e-3, 1e-10, 1e-30, 1e-100)]
        assert all(a > b > 1 - 0.01 for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] == pytest.approx(1.0, rel=0.01)


def test_pde_oracle_at_generic_point():
    w = 0.3 + 0.8j
    est = hurwitz_general(PuncturedPlane((0, 1)), w, SolverConfig(grid=257))
    assert eta_C01(w) == pytest.approx(est.value, rel=0.03)


@settings(max_examples=60, deadline=None)
@given(finite, finite)
def test_anharmonic_covariance(x, y):
    t = point(x, y)
    h = eta_C01(t)
    assert eta_C01(1 - t) == pytest.approx(h, rel=1e-9)
    assert eta_C01(t.conjugate()) == pytest.approx(h, rel=1e-9)
    assert eta_C01(1 / t) == pytest.approx(abs(t) ** 2 * h, rel=1e-9)
    assert eta_C01(t / (t - 1)) == pytest.approx(abs(t - 1) ** 2 * h, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(finite, finite)
def test_envelopes(x, y):
    t = point(x, y)
    d = min(abs(t), abs(t - 1))
    h = eta_C01(t)
    assert 1 / (8 * d) * (1 - 0.02) <= h <= 2 / d


@settings(max_examples=30, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_affine_covariance(ax, ay, bx, by, wx, wy):
    a, b, w = complex(ax, ay), complex(bx, by), complex(wx, wy)
    assume(abs(a - b) > 1e-2 and abs(w - a) > 1e-3 and abs(w - b) > 1e-3)
    t = (w - a) / (b - a)
    assert eta_two_punctures(a, b, w) == pytest.approx(eta_C01(t) / abs(b - a), rel=1e-12)
    assert eta_two_punctures(b, a, w) == pytest.approx(eta_two_punctures(a, b, w), rel=1e-9)


def test_vectorised():
    t = np.array([0.5, -1, 2, 0.3 + 0.8j])
    assert np.allclose(eta_C01(t), [eta_C01(complex(z)) for z in t], rtol=1e-14)


def test_errors():
    with pytest.raises(PunctureValue):
        eta_C01(0)
    with pytest.raises(PunctureValue):
        eta_C01(np.array([0.5, 1]))
    with pytest.raises(DegeneratePair):
        eta_two_punctures(1, 1, 0)
    with pytest.raises(PunctureValue):
        eta_two_punctures(0, 2, 2)


def test_tau_coordinates_in_fundamental_region():
    rng = np.random.default_rng(1)
    t = rng.normal(size=50) + 1j * rng.normal(size=50)
    v, x, tau = tau_coordinates(t)
    assert np.all((v >= 0) & (v <= V_MAX + 1e-9))
    assert np.all(x <= X_MAX + 1e-9)


def test_fit_interpolates_nodes():
    vn = lobatto(6, 0.0, V_MAX)
    xn = np.sqrt(lobatto(3, 0.0, X_MAX ** 2))
    f = lambda v, x: 1 + 0.3 * v - 0.1 * v * v + 0.05 * x * x  # noqa: E731
    vals = f(vn[:, None], xn[None, :])
    tab = EtaTable(fit(vn, xn, vals), vn, xn, vals, np.zeros_like(vals), {})
    V, X = np.meshgrid(vn, xn, indexing="ij")
    assert np.allclose(tab.g(V, X), vals, atol=1e-13)
    # polynomials in (v, x**2) of low degree are reproduced everywhere
    assert float(tab.g(0.37, 0.21)) == pytest.approx(f(0.37, 0.21), abs=1e-12)


def test_lobatto():
    n = lobatto(5, 0, 2)
    assert n[0] == 0 and n[-1] == 2 and np.all(np.diff(n) > 0)


def test_table_round_trip():
    tab = load_table()
    again = EtaTable.from_dict(json.loads(json.dumps(tab.to_dict())))
    assert np.array_equal(again.coeffs, tab.coeffs)
    assert again.error == tab.error or (math.isnan(again.error) and math.isnan(tab.error))
    with pytest.raises(ValueError):
        EtaTable.from_dict(dict(tab.to_dict(), version=99))


def test_environment_override(tmp_path, monkeypatch):
    tab = load_table()
    d = tab.to_dict()
    d["coeffs"] = (2 * np.array(d["coeffs"])).tolist()
    p = tmp_path / "t.json"
    p.write_text(json.dumps(d))
    monkeypatch.setenv("METRICROOM_ETA_TABLE", str(p))
    etatable.load_table.cache_clear()
    try:
        assert eta_C01(0.3 + 0.8j) == pytest.approx(2 * eta_C01(0.3 + 0.8j, tab), rel=1e-12)
    finally:
        monkeypatch.undo()
        etatable.load_table.cache_clear()


def test_workers_env(monkeypatch):
    monkeypatch.setenv("METRICROOM_WORKERS", "3")
    assert etatable.workers() == 3
    monkeypatch.setenv("METRICROOM_WORKERS", "junk")
    assert etatable.workers() == 1
    monkeypatch.delenv("METRICROOM_WORKERS")
    assert etatable.workers() == 1

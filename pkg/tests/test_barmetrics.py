import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricroom.barmetrics import (OptimizerBudget, affine_invariance_check, candidate_points, delta_bar,
                                   eta_bar, kappa, lsc_probe, pair_supremum)
from metricroom.errors import InsufficientComplementSamples, PointNotInDomain
from metricroom.geometry import (Annulus, Disk, ExteriorDisk, Polygon, PuncturedPlane, boundary_distance,
                                 in_complement, nearest_boundary_point)
from metricroom.hurwitz import hurwitz_two_punctures
from metricroom.liouville import SolverConfig
from metricroom.modular import density_C01, density_two_punctures

DOMAINS = [
    (Disk(0, 1), [0, 0.5, 0.3 - 0.6j]),
    (ExteriorDisk(0, 1), [1.5, 3j]),
    (Annulus(0.5, 1), [0.75, -0.6j]),
    (PuncturedPlane((0, 1)), [0.5, -1, 2 + 1j]),
    (PuncturedPlane((0, 1, 1j)), [0.5 + 0.4j, -1]),
    (Polygon((-0.5 - 0.5j, 0.5 - 0.5j, 0.5 + 0.5j, -0.5 + 0.5j)), [0, 0.3 + 0.1j]),
]
CASES = [(d, w) for d, ws in DOMAINS for w in ws]


# ----------------------------------------------------------------------
# kappa
# ----------------------------------------------------------------------

def test_kappa_twice_punctured_is_lambda():
    r = kappa(PuncturedPlane((0, 1)), 0.3 + 0.2j)
    assert set(r.argmax_pair) == {0, 1}
    assert r.value == pytest.approx(float(density_C01(0.3 + 0.2j)), rel=1e-12)


def test_kappa_disk_sandwich():
    r = kappa(Disk(0, 1), 0)
    assert r.value <= 2
    assert r.value >= float(density_C01(0.5)) / 2 * (1 - 1e-12)


@pytest.mark.parametrize("dom,w", CASES)
def test_optimizer_soundness(dom, w):
    r = kappa(dom, w)
    a, b = r.argmax_pair
    assert in_complement(dom, a) and in_complement(dom, b)
    assert abs(a - b) > 1e-9
    assert r.value == pytest.approx(density_two_punctures(a, b, w), rel=1e-12, abs=0)
    assert r.attainment_residual >= 0
    vals = [v for _, v, _ in r.method_trace]
    assert all(y >= x for x, y in zip(vals, vals[1:]))
    assert r.evaluations > 0


def test_optimizer_is_deterministic():
    a = kappa(Annulus(0.5, 1), 0.7 + 0.1j)
    b = kappa(Annulus(0.5, 1), 0.7 + 0.1j)
    assert a.to_dict() == b.to_dict()


def test_kappa_below_lambda_disk():
    for w in (0, 0.5, 0.8j):
        assert kappa(Disk(0, 1), w).value <= 2 / (1 - abs(w) ** 2)


def test_errors():
    with pytest.raises(PointNotInDomain):
        kappa(Disk(0, 1), 2)
    with pytest.raises(InsufficientComplementSamples):
        pair_supremum(PuncturedPlane((0,)), 1, lambda A, B: np.ones(len(A)))
    with pytest.raises(ValueError):
        OptimizerBudget(coarse_pairs=0)


def test_candidates_lie_in_complement():
    for dom, _ in DOMAINS:
        c = candidate_points(dom)
        assert len(c) >= 2
        assert all(in_complement(dom, z) for z in c)


# ----------------------------------------------------------------------
# delta_bar
# ----------------------------------------------------------------------

def test_delta_bar_examples():
    assert delta_bar(Disk(0, 1), 0) == pytest.approx(1.0, abs=1e-12)
    assert delta_bar(PuncturedPlane((0, 1)), 3) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("dom,w", CASES)
def test_delta_bar_identity(dom, w):
    budget = OptimizerBudget()
    assert abs(delta_bar(dom, w, budget) - 1 / boundary_distance(dom, w)) <= budget.simplex_tolerance


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 0.95), st.floats(0, 2 * math.pi))
def test_delta_bar_identity_disk_property(r, t):
    w = r * complex(math.cos(t), math.sin(t))
    assert abs(delta_bar(Disk(0, 1), w) - 1 / (1 - r)) <= 1e-9


# ----------------------------------------------------------------------
# eta_bar
# ----------------------------------------------------------------------

def test_eta_bar_sharpness_on_twice_punctured_plane():
    w = 0.5 + 0.4j
    r = eta_bar(PuncturedPlane((0, 1)), w)
    assert set(r.argmax_pair) == {0, 1}
    eta = hurwitz_two_punctures(0, 1, w, SolverConfig(grid=257))
    assert r.value == pytest.approx(eta.value, rel=0.04)


@pytest.mark.parametrize("w,exact", [(0.5, 1.0), (-1, 0.25), (2, 0.25)])
def test_eta_bar_exact_values(w, exact):
    # the twice punctured plane has a single admissible pair, so eta_bar is eta
    assert eta_bar(PuncturedPlane((0, 1)), w).value == pytest.approx(exact, rel=0.01)


@pytest.mark.parametrize("dom,w", CASES)
def test_eta_bar_envelopes(dom, w):
    r = eta_bar(dom, w)
    d = boundary_distance(dom, w)
    assert r.lower == max(1 / (8 * d), r.value)
    assert r.upper == 2 / d
    assert 1 / (8 * d) <= r.value * 1.05 and r.value <= 2 / d * 1.05


@pytest.mark.parametrize("dom,w", CASES)
def test_eta_bar_at_least_single_puncture_limit(dom, w):
    p = nearest_boundary_point(dom, w)
    assert eta_bar(dom, w).value >= 1 / (8 * abs(w - p)) * (1 - 1e-9)


def test_eta_bar_domain_monotone():
    # square inside the disk: the smaller domain has the larger density
    sq = Polygon((-0.5 - 0.5j, 0.5 - 0.5j, 0.5 + 0.5j, -0.5 + 0.5j))
    for w in (0, 0.2 + 0.1j):
        assert eta_bar(sq, w).value >= eta_bar(Disk(0, 1), w).value * (1 - 1e-9)


def test_affine_invariance_identity():
    r = affine_invariance_check(Disk(0, 1), 0.3, 1, 0)
    assert r["deviation"] == 0


def test_affine_invariance_closed_pair():
    r = affine_invariance_check(PuncturedPlane((0, 1)), 0.5 + 0.4j, 2, 1)
    assert r["deviation"] < 1e-9


def test_affine_invariance_rotation_disk():
    r = affine_invariance_check(Disk(0, 1), 0.4 + 0.1j, 1j, 0)
    assert r["deviation"] < 0.02


def test_lsc_constant_sequence():
    r = lsc_probe(Disk(0, 1), 0.3, [0.3] * 4)
    assert r["gap"] == 0 and r["passed"]


def test_lsc_twice_punctured():
    r = lsc_probe(PuncturedPlane((0, 1)), -1, [-1 + 1 / k for k in range(2, 10)])
    assert r["passed"]


def test_lsc_exterior_disk():
    r = lsc_probe(ExteriorDisk(0, 1), 2, [2 + 2.0 ** -k for k in range(1, 13)])
    assert r["passed"]

import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricroom import modular as M
from metricroom.errors import BranchCut, DegeneratePair, PunctureValue

mp.mp.dps = 30

GOLDEN_LAMBDA_M1 = float(mp.gamma(mp.mpf(3) / 4) ** 4 / mp.pi ** 2)
GOLDEN_K = float(mp.pi ** 2 / mp.gamma(mp.mpf(3) / 4) ** 4)


def K_quad(m):
    """Direct quadrature of int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)."""
    m = mp.mpc(m)
    return complex(mp.quad(lambda t: 1 / mp.sqrt(1 - m * mp.sin(t) ** 2), [0, mp.pi / 2]))


def lambda01_oracle(w):
    """Independent formula from complete elliptic integrals only (mpmath).

    On the principal slit plane, Im tau = Re(K(1-w) conj K(w)) / |K(w)|^2 and
    theta_3^2 = 2K/pi, which collapses the density to
    pi / (4 |w| |1-w| Re(K(1-w) conj K(w))).
    """
    w = mp.mpc(w)
    if w.imag == 0 and not (0 < w.real < 1):
        # pull back from the principal region through w -> 1/w or w -> 1-w
        if w.real < 0:
            v = 1 / (1 - w)  # lies in (0, 1)
            return lambda01_oracle(v) * abs(1 / (1 - w) ** 2)
        v = 1 / w
        return lambda01_oracle(v) / abs(w) ** 2
    k = mp.ellipk(w)
    kp = mp.ellipk(1 - w)
    return float(mp.pi / (4 * abs(w) * abs(1 - w) * mp.re(kp * mp.conj(k))))


# ---------------------------------------------------------------- AGM / K

def test_agm_trivial():
    assert M.agm(1, 1) == 1
    assert abs(M.agm(2.5 - 1j, 2.5 - 1j) - (2.5 - 1j)) < 1e-15


def test_agm_against_mpmath():
    for a, b in [(1, 1 / math.sqrt(2)), (1, 0.1), (1 + 1j, 2 - 0.5j), (3, 1j)]:
        ref = complex(mp.agm(a, b))
        assert abs(M.agm(a, b) - ref) < 1e-14 * abs(ref)


def test_agm_rejects_negative_ratio():
    with pytest.raises(ValueError):
        M.agm(1, -2)


def test_K_from_agm_matches_quadrature():
    m = 0.5
    assert abs(math.pi / (2 * M.agm(1, 1 / math.sqrt(2))) - K_quad(m)) < 1e-12


@pytest.mark.parametrize("m", [0, 0.5, -1, 0.9, 0.3 + 0.4j, -2 - 1j])
def test_elliptic_K_quadrature(m):
    assert abs(M.elliptic_K(m) - K_quad(m)) < 1e-12 * abs(K_quad(m))


def test_elliptic_K_zero():
    assert abs(M.elliptic_K(0) - math.pi / 2) < 1e-15


@pytest.mark.parametrize("m", [1, 1.5, 10])
def test_elliptic_K_branch_cut(m):
    with pytest.raises(BranchCut):
        M.elliptic_K(m)


# ---------------------------------------------------------------- theta

@pytest.mark.parametrize("tau", [1j, 0.5j + 0.3, 2j - 0.7, 0.6j + 0.9, 1.3j])
def test_theta_against_mpmath(tau):
    q = cmath.exp(1j * math.pi * tau)
    t2, t3, t4 = M.theta_constants(tau)
    for n, t in [(2, t2), (3, t3), (4, t4)]:
        ref = complex(mp.jtheta(n, 0, q))
        assert abs(t - ref) < 1e-13 * abs(ref)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(0.5, 6))
def test_jacobi_identity(x, y):
    t2, t3, t4 = M.theta_constants(complex(x, y))
    assert abs(t3 ** 4 - t2 ** 4 - t4 ** 4) <= 1e-12 * abs(t3) ** 4


def test_theta_limits_and_periodicity():
    t2, t3, t4 = M.theta_constants(40j)
    assert abs(t3 - 1) < 1e-15 and abs(t4 - 1) < 1e-15 and abs(t2) < 1e-10
    a = M.theta_constants(0.3 + 0.8j)[1]
    b = M.theta_constants(2.3 + 0.8j)[1]
    assert abs(a - b) < 1e-13


def test_theta_at_i_gives_half():
    t2, t3, _ = M.theta_constants(1j)
    assert abs(t2 ** 4 / t3 ** 4 - 0.5) < 1e-12


# ---------------------------------------------------------------- lambda

def test_modular_lambda_values():
    assert abs(M.modular_lambda(1j) - 0.5) < 1e-12
    assert abs(M.modular_lambda(1 + 1j) + 1) < 1e-12
    v = M.modular_lambda(2j)
    assert abs(v.imag) < 1e-14 and 0 < v.real < 0.5
    assert abs(M.modular_lambda(M.inverse_lambda(v)) - v) < 1e-10


def test_modular_lambda_against_mpmath():
    for tau in [0.2 + 0.4j, -0.7 + 0.3j, 1.1 + 2j, 3.3 + 0.05j]:
        q = mp.exp(1j * mp.pi * tau)
        ref = complex((mp.jtheta(2, 0, q) / mp.jtheta(3, 0, q)) ** 4)
        got = M.modular_lambda(tau)
        assert abs(got - ref) < 1e-9 * max(1, abs(ref))


def test_lambda_derivative_finite_difference():
    tau = 0.3 + 0.9j
    h = 1e-6
    fd = (M.modular_lambda(tau + h) - M.modular_lambda(tau - h)) / (2 * h)
    assert abs(M.modular_lambda_derivative(tau) - fd) < 1e-7 * abs(fd)


def test_inverse_lambda_examples():
    assert abs(M.inverse_lambda(0.5).value - 1j) < 1e-10
    t = M.inverse_lambda(-1)
    assert t.reduced and abs(t.imag - 1) < 1e-10
    assert abs(M.modular_lambda(t) + 1) < 1e-10
    with pytest.raises(PunctureValue):
        M.inverse_lambda(0)
    with pytest.raises(PunctureValue):
        M.inverse_lambda(1)


def test_inverse_lambda_round_trip_200():
    rng = np.random.default_rng(7)
    n = 0
    while n < 200:
        r = math.exp(rng.uniform(math.log(0.05), math.log(20)))
        w = r * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        if abs(w) < 0.05 or abs(w - 1) < 0.05:
            continue
        tau = M.inverse_lambda(w)
        assert tau.imag > 0
        assert abs(M.modular_lambda(tau) - w) < 1e-10 * (1 + abs(w))
        n += 1


@pytest.mark.parametrize("w", [-3.0, -0.2, 0.3, 1.7, 4.0])
def test_inverse_lambda_real_slits(w):
    assert abs(M.modular_lambda(M.inverse_lambda(w)) - w) < 1e-10 * (1 + abs(w))


# ---------------------------------------------------------------- density

def test_density_golden_value():
    assert abs(M.density_C01(-1) - GOLDEN_LAMBDA_M1) < 1e-10
    assert abs(GOLDEN_LAMBDA_M1 - 0.2284731) < 1e-6


def test_golden_value_from_high_precision_theta():
    # at tau = 1+i: |lambda'| = pi*|l||1-l||theta_3|^4 with l = -1, Im tau = 1
    q = mp.exp(1j * mp.pi * (1 + 1j))
    t3 = mp.jtheta(3, 0, q)
    val = 1 / (mp.pi * 2 * abs(t3) ** 4)
    assert abs(float(val) - M.density_C01(-1)) < 1e-13
    # reflection formula route: Gamma(1/4)Gamma(3/4) = pi sqrt 2
    g14 = mp.gamma(mp.mpf(1) / 4)
    assert abs(float(4 * mp.pi ** 2 / g14 ** 4) - GOLDEN_LAMBDA_M1) < 1e-15
    assert abs(math.gamma(0.75) ** 4 / math.pi ** 2 - M.density_C01(-1)) < 1e-13


@pytest.mark.parametrize("w", [0.5, 0.1 + 0.2j, -2 + 3j, 3.5, -0.4, 1 + 1j, 0.9999j, 12 - 7j, 1e-3 + 2e-3j])
def test_density_against_agm_oracle(w):
    assert abs(M.density_C01(w) - lambda01_oracle(w)) < 1e-12 * lambda01_oracle(w)


@settings(max_examples=150, deadline=None)
@given(st.complex_numbers(min_magnitude=0.02, max_magnitude=30, allow_nan=False, allow_infinity=False))
def test_density_symmetries(w):
    if abs(w - 1) < 0.02:
        return
    v = M.density_C01(w)
    assert abs(M.density_C01(1 - w) - v) < 1e-10 * v
    assert abs(M.density_C01(w.conjugate()) - v) < 1e-10 * v
    # the inversion w -> 1/w is an automorphism as well
    assert abs(M.density_C01(1 / w) / abs(w) ** 2 - v) < 1e-10 * v


def test_density_vectorised():
    ws = np.array([-1, 0.5, 2 + 1j, -3j])
    out = M.density_C01(ws)
    assert out.shape == (4,)
    assert np.allclose(out, [M.density_C01(w) for w in ws], rtol=1e-14)


def test_density_puncture_error():
    with pytest.raises(PunctureValue):
        M.density_C01(0)
    with pytest.raises(PunctureValue):
        M.density_C01(np.array([0.5, 1.0]))


def test_cusp_asymptotics():
    # lambda ~ 1/(r log(16/r)) with O(r) relative correction
    for r in [1e-3, 1e-4, 1e-5, 1e-6]:
        v = M.density_C01(r)
        assert abs(r * math.log(16 / r) * v - 1) < 10 * r
    # hence r |log r| lambda -> 1, slowly and from below
    vals = [r * abs(math.log(r)) * M.density_C01(r) for r in [1e-3, 1e-6, 1e-9, 1e-12]]
    assert all(a < b < 1 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - 1) < 0.1


def test_two_punctures_examples():
    ref = M.density_C01(-1)
    assert abs(M.density_two_punctures(0, 1, -1) - ref) < 1e-15
    assert abs(M.density_two_punctures(0, 2, -2) - ref / 2) < 1e-15
    assert abs(M.density_two_punctures(1j, 1 + 1j, -1 + 1j) - ref) < 1e-14
    with pytest.raises(DegeneratePair):
        M.density_two_punctures(1, 1, 0)
    with pytest.raises(PunctureValue):
        M.density_two_punctures(0, 1, 1)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_affine_covariance(a, d, w):
    b = a + d
    if min(abs(w - a), abs(w - b)) < 1e-3:
        return
    got = M.density_two_punctures(a, b, w) * abs(b - a)
    # second code path: oracle built from mpmath elliptic integrals
    ref = lambda01_oracle((w - a) / (b - a))
    assert abs(got - ref) < 1e-12 * ref


def test_constant_K():
    assert abs(M.constant_K() - GOLDEN_K) < 1e-6
    assert abs(M.constant_K() - 4.376879) < 1e-6
    assert M.PRINTED_K == 4.3859
    assert abs(2 * M.constant_K() * M.hempel_lower_bound(-1) - 1) < 1e-14


def test_hempel_examples():
    K = M.constant_K()
    assert abs(M.hempel_lower_bound(-1) - 1 / (2 * K)) < 1e-15
    assert abs(M.hempel_lower_bound(-1) - 0.11424) < 1e-5
    assert abs(M.hempel_lower_bound(0.1) - 1 / (0.2 * (math.log(10) + K))) < 1e-14
    with pytest.raises(PunctureValue):
        M.hempel_lower_bound(1)


def test_hempel_sweep():
    xs = np.linspace(-3, 4, 71)
    ys = np.linspace(-3, 3, 61)
    Z = (xs[:, None] + 1j * ys[None, :]).ravel()
    Z = Z[(np.abs(Z) > 1e-9) & (np.abs(Z - 1) > 1e-9)]
    assert np.all(M.density_C01(Z) >= M.hempel_lower_bound(Z))
    # factor 2 to spare at -1 under curvature -1
    assert abs(M.density_C01(-1) / M.hempel_lower_bound(-1) - 2) < 1e-12


def test_anharmonic_reduce_region():
    rng = np.random.default_rng(3)
    w = rng.normal(size=500) * 3 + 1j * rng.normal(size=500) * 3
    wr, f = M.anharmonic_reduce(w)
    assert np.all(wr.real <= 0.5 + 1e-12)
    assert np.all(np.abs(wr) <= 1 + 1e-12)
    assert np.all(np.abs(wr - 1) <= 1 + 1e-12)
    assert np.allclose(M.density_C01(wr) * f, M.density_C01(w), rtol=1e-11)

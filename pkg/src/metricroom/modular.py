r"""Hyperbolic density of the twice-punctured plane.

The universal covering of :math:`\mathbb{C}\setminus\{0,1\}` by the upper
half-plane is the elliptic modular function

.. math::

    \lambda(\tau) = \frac{\vartheta_2(\tau)^4}{\vartheta_3(\tau)^4},
    \qquad q = e^{i\pi\tau},

with inverse :math:`\tau = iK(1-w)/K(w)` on the slit plane.  Pulling back the
half-plane density :math:`|d\tau|/\operatorname{Im}\tau` gives

.. math::

    \lambda_{\mathbb{C}\setminus\{0,1\}}(w)
        = \frac{1}{\operatorname{Im}\tau\,|\lambda'(\tau)|},
    \qquad \lambda'(\tau) = i\pi\,\lambda(1-\lambda)\,\vartheta_3(\tau)^4 .

Every density in this package uses the curvature -1 normalisation
(:math:`2/(1-|z|^2)` on the unit disk).  Densities are returned as plain
floats (or float arrays for array input).

Elliptic integrals use the parameter convention ``m = k**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchCut, DegeneratePair, NonConvergence, PunctureValue

__all__ = [
    "Tau",
    "agm",
    "elliptic_K",
    "theta_constants",
    "modular_lambda",
    "modular_lambda_derivative",
    "inverse_lambda",
    "density_C01",
    "density_two_punctures",
    "hempel_lower_bound",
    "constant_K",
    "PRINTED_K",
    "anharmonic_reduce",
    "reduce_sl2z",
    "reduced_modulus",
]

#: value of the Hempel constant as printed in the source literature
PRINTED_K = 4.3859

_AGM_MAXITER = 64
_THETA_TERM_FLOOR = 1e-17


@dataclass(frozen=True)
class Tau:
    """A point of the upper half-plane used as a modular parameter.

    ``reduced`` is True when ``value`` lies in the closed fundamental domain
    of the level-2 congruence group,
    ``|Re tau| <= 1, |tau - 1/2| >= 1/2, |tau + 1/2| >= 1/2``.
    """

    value: complex
    reduced: bool = False

    def __post_init__(self):
        if not self.value.imag > 0:
            raise ValueError(f"tau must lie in the upper half-plane, got {self.value}")

    @property
    def imag(self) -> float:
        return self.value.imag


def _as_tau(tau) -> complex:
    if isinstance(tau, Tau):
        return tau.value
    return complex(tau)


# --------------------------------------------------------------------------
# AGM and complete elliptic integral
# --------------------------------------------------------------------------

def agm(a, b):
    """Arithmetic-geometric mean of two complex numbers.

    At each step the geometric mean is the square root ``g`` of ``a*b`` with
    ``|a' - g| <= |a' + g|`` (the "right" choice), which selects the
    principal value whenever ``Re(a/b) > 0``.

    Works elementwise on arrays.

    Raises
    ------
    ValueError
        if ``a`` or ``b`` is zero or ``a/b`` is a negative real.
    NonConvergence
        if 64 iterations do not reach a relative tolerance of 1e-15.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scalar = a.ndim == 0 and b.ndim == 0
    a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
    a = a.copy()
    b = b.copy()
    if np.any(a == 0) or np.any(b == 0):
        raise ValueError("agm arguments must be nonzero")
    ratio = a / b
    if np.any((ratio.imag == 0) & (ratio.real < 0)):
        raise ValueError("agm undefined when a/b is a negative real")
    done = np.zeros(a.shape, dtype=bool)
    for _ in range(_AGM_MAXITER):
        a1 = 0.5 * (a + b)
        g = np.sqrt(a * b)
        flip = np.abs(a1 - g) > np.abs(a1 + g)
        g = np.where(flip, -g, g)
        a = np.where(done, a, a1)
        b = np.where(done, b, g)
        done |= np.abs(a - b) <= 1e-15 * np.abs(a)
        if done.all():
            break
    else:
        raise NonConvergence("agm did not converge in 64 iterations")
    out = 0.5 * (a + b)
    return complex(out[0]) if scalar else out


def elliptic_K(m):
    """Complete elliptic integral of the first kind, ``K(m) = pi / (2 agm(1, sqrt(1-m)))``.

    Analytic on the plane slit along ``[1, inf)``; the real segment
    ``[1, inf)`` raises :class:`BranchCut`.
    """
    m = np.asarray(m, dtype=complex)
    on_cut = (m.imag == 0) & (m.real >= 1)
    if np.any(on_cut):
        raise BranchCut("elliptic_K is cut along [1, inf)")
    k = agm(1.0, np.sqrt(1 - m))
    out = np.pi / (2 * np.asarray(k))
    return complex(out) if m.ndim == 0 else out


# --------------------------------------------------------------------------
# theta constants and the modular function
# --------------------------------------------------------------------------

def _theta_series(tau, nterms=None):
    """theta_2, theta_3, theta_4 at nome exp(i pi tau), vectorised."""
    tau = np.asarray(tau, dtype=complex)
    if np.any(tau.imag <= 0):
        raise ValueError("theta constants need Im(tau) > 0")
    if nterms is None:
        ymin = float(np.min(tau.imag))
        # |q|**(n**2) < 1e-17  <=>  n**2 > 17 ln10 / (pi * Im tau)
        nterms = int(math.ceil(math.sqrt(-math.log(_THETA_TERM_FLOOR) / (math.pi * ymin)))) + 1
    q = np.exp(1j * np.pi * tau)
    q4 = np.exp(0.25j * np.pi * tau)
    t2 = np.zeros_like(q)
    t3 = np.zeros_like(q)
    t4 = np.zeros_like(q)
    # sum from the smallest terms upwards
    for n in range(nterms, 0, -1):
        qn2 = np.exp(1j * np.pi * tau * n * n)
        t3 = t3 + qn2
        t4 = t4 + (-1) ** n * qn2
        t2 = t2 + np.exp(1j * np.pi * tau * n * (n + 1))
    t2 = 2 * q4 * (1 + t2)
    t3 = 1 + 2 * t3
    t4 = 1 + 2 * t4
    return t2, t3, t4, q


def theta_constants(tau):
    """Jacobi theta constants ``(theta_2, theta_3, theta_4)`` at ``q = exp(i pi tau)``.

    The q-series are summed until the term magnitude drops below 1e-17.
    """
    t = np.asarray(_as_tau(tau) if not isinstance(tau, np.ndarray) else tau, dtype=complex)
    t2, t3, t4, _ = _theta_series(t)
    if t.ndim == 0:
        return complex(t2), complex(t3), complex(t4)
    return t2, t3, t4


def reduce_sl2z(tau):
    """Move ``tau`` into the standard SL(2, Z) fundamental domain.

    Returns ``(tau_reduced, word)`` where ``word`` lists the applied steps in
    order: ``("T", n)`` for ``tau -> tau - n`` and ``("S",)`` for
    ``tau -> -1/tau``.
    """
    tau = complex(tau)
    word = []
    for _ in range(200):
        n = math.floor(tau.real + 0.5)
        if n:
            tau -= n
            word.append(("T", n))
        if abs(tau) < 1 - 1e-15:
            tau = -1 / tau
            word.append(("S",))
        else:
            break
    return tau, word


def _lambda_unwind(lam, word):
    # word maps tau_orig -> tau_red; undo it in reverse on the lambda value
    for step in reversed(word):
        if step[0] == "S":
            lam = 1 - lam
        elif step[1] % 2:
            lam = lam / (lam - 1)
    return lam


def modular_lambda(tau):
    """Elliptic modular function ``theta_2**4 / theta_3**4``.

    The argument is first reduced into the SL(2, Z) fundamental domain
    (``Im tau >= sqrt(3)/2``), where the q-series converges fast, and the
    value is transported back with ``lambda(tau+1) = lambda/(lambda-1)`` and
    ``lambda(-1/tau) = 1 - lambda``.
    """
    t = _as_tau(tau)
    if not t.imag > 0:
        raise ValueError("modular_lambda needs Im(tau) > 0")
    tr, word = reduce_sl2z(t)
    t2, t3, _, _ = _theta_series(tr)
    lam = complex((t2 / t3) ** 4)
    return _lambda_unwind(lam, word)


def modular_lambda_derivative(tau):
    """``d lambda / d tau = i pi lambda (1 - lambda) theta_3(tau)**4``."""
    t = _as_tau(tau)
    lam = modular_lambda(t)
    _, t3, _ = theta_constants(t)
    return 1j * math.pi * lam * (1 - lam) * t3 ** 4


def _gamma2_reduce(tau: complex) -> complex:
    """Reduce into ``|Re| <= 1, |tau -+ 1/2| >= 1/2`` using level-2 generators."""
    for _ in range(500):
        n = math.floor((tau.real + 1) / 2)
        tau -= 2 * n
        if abs(tau - 0.5) < 0.5 - 1e-15:
            tau = tau / (1 - 2 * tau)
        elif abs(tau + 0.5) < 0.5 - 1e-15:
            tau = tau / (1 + 2 * tau)
        else:
            return tau
    raise NonConvergence("level-2 reduction did not terminate")


def _principal_tau(w: complex) -> complex:
    return 1j * elliptic_K(1 - w) / elliptic_K(w)


def inverse_lambda(w) -> Tau:
    """A modular parameter ``tau`` with ``modular_lambda(tau) == w``.

    Branch handling on the two slits of ``iK(1-w)/K(w)``:

    ===============  ======================================  ==================
    input            formula                                 example
    ===============  ======================================  ==================
    off the reals,   ``iK(1-w)/K(w)``                         ``1/2 -> i``
    or 0 < w < 1
    w < 0            ``tau(w/(w-1)) + 1``                     ``-1 -> 1+i``
    w > 1            ``t/(1-t)`` with ``t = tau(1/w)``        ``2 -> (1+i)/2``
    ===============  ======================================  ==================

    The result is reduced into the level-2 fundamental domain.
    """
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError("inverse_lambda needs a finite argument")
    if w == 0 or w == 1:
        raise PunctureValue(f"{w} is a puncture of C minus {{0, 1}}")
    if w.imag == 0 and w.real < 0:
        tau = _principal_tau(w / (w - 1)) + 1
    elif w.imag == 0 and w.real > 1:
        t = _principal_tau(1 / w)
        tau = t / (1 - t)
    else:
        tau = _principal_tau(w)
    return Tau(_gamma2_reduce(tau), reduced=True)


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

def anharmonic_reduce(w):
    """Map ``w`` by the anharmonic group onto the image of smallest modulus.

    The six maps permute ``{0, 1, inf}``.  The chosen image lies in
    ``{Re <= 1/2, |w - 1| <= 1}`` (up to conjugation).  Returns
    ``(w_reduced, factor)`` with ``factor = |M'(w)|`` so that any conformal
    density ``rho`` of the thrice-punctured sphere satisfies
    ``rho(w) = rho(w_reduced) * factor``.
    """
    w = np.asarray(w, dtype=complex)
    one_minus = 1 - w
    aw = np.abs(w)
    a1 = np.abs(one_minus)
    images = np.stack([w, one_minus, 1 / w, 1 / one_minus, w / (w - 1), (w - 1) / w])
    factors = np.stack([
        np.ones_like(aw), np.ones_like(aw), 1 / aw ** 2, 1 / a1 ** 2, 1 / a1 ** 2, 1 / aw ** 2,
    ])
    k = np.argmin(np.abs(images), axis=0)
    wr = np.take_along_axis(images, k[None, ...], axis=0)[0]
    fr = np.take_along_axis(factors, k[None, ...], axis=0)[0]
    return wr, fr


def reduced_modulus(w):
    """``(tau, factor, w_reduced)`` for the smallest-modulus anharmonic image.

    ``tau = iK(1-w')/K(w')`` with ``K(1-w')`` evaluated as
    ``pi/(2 agm(1, sqrt(w')))``, which keeps full accuracy for tiny ``w'``.
    """
    arr = np.asarray(w, dtype=complex)
    wr, factor = anharmonic_reduce(arr)
    k1 = np.pi / (2 * np.asarray(agm(1.0, np.sqrt(wr))))
    tau = 1j * k1 / np.asarray(elliptic_K(wr))
    return tau, factor, wr


def density_C01(w):
    """Hyperbolic density of ``C minus {0, 1}`` at ``w`` (curvature -1).

    Evaluated as ``1/(Im tau |lambda'(tau)|)`` at ``tau = inverse_lambda(w')``
    where ``w'`` is the anharmonic image of ``w`` of smallest modulus; the
    density transforms by ``|M'(w)|``.  Accepts scalars or arrays.
    """
    arr = np.asarray(w, dtype=complex)
    if np.any(~np.isfinite(arr)):
        raise ValueError("density_C01 needs finite arguments")
    if np.any((arr == 0) | (arr == 1)):
        raise PunctureValue("density_C01 is undefined at the punctures 0 and 1")
    # the reduced point stays off both slits except on (0, 1/2], where the
    # formula is regular
    tau, factor, wr = reduced_modulus(arr)
    _, t3, _, _ = _theta_series(tau)
    dlam = np.pi * np.abs(wr) * np.abs(1 - wr) * np.abs(t3) ** 4
    out = factor / (tau.imag * dlam)
    return float(out) if arr.ndim == 0 else out


def density_two_punctures(a, b, w):
    """Hyperbolic density of ``C minus {a, b}`` at ``w``.

    Uses the affine covariance
    ``lambda_{C-{a,b}}(w) = lambda_{C-{0,1}}((w-a)/(b-a)) / |b-a|``.
    """
    a = complex(a)
    b = complex(b)
    if a == b:
        raise DegeneratePair("the two punctures coincide")
    w = np.asarray(w, dtype=complex)
    if np.any((w == a) | (w == b)):
        raise PunctureValue("evaluation point is a puncture")
    d = b - a
    return density_C01((w - a) / d) / abs(d)


def constant_K() -> float:
    """Hempel's constant ``Gamma(1/4)**4 / (4 pi**2) = pi**2 / Gamma(3/4)**4``.

    Computed from the theta machinery as ``1 / density_C01(-1)``; the
    printed literature value is :data:`PRINTED_K`.
    """
    return 1.0 / density_C01(-1.0)


_K_CACHE: list[float] = []


def _cached_K() -> float:
    if not _K_CACHE:
        _K_CACHE.append(constant_K())
    return _K_CACHE[0]


def hempel_lower_bound(z):
    """``1 / (2|z| (|log|z|| + K))`` - Hempel's lower bound for ``lambda_{C-{0,1}}``.

    The bound is sharp at ``z = -1`` in the curvature -4 normalisation; under
    curvature -1 it holds with a factor 2 to spare.
    """
    z = np.asarray(z, dtype=complex)
    if np.any((z == 0) | (z == 1)):
        raise PunctureValue("Hempel bound undefined at the punctures")
    r = np.abs(z)
    out = 1.0 / (2 * r * (np.abs(np.log(r)) + _cached_K()))
    return float(out) if z.ndim == 0 else out

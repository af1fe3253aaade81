"""Hurwitz density ``eta = 2/r``.

Closed forms cover simply connected domains (where the Hurwitz and hyperbolic
densities coincide) and once-punctured planes (``1/(8|w - p|)``).  Every other
domain goes through the extraction identity: if ``lam`` is the hyperbolic
density of ``Omega`` with ``w`` removed, then

    1/(r lam(w + r e^{it})) + log r  ->  log(2/eta(w))     as r -> 0

with an ``O(r)`` correction.  The left side is averaged over 32 angles and
extrapolated linearly in ``r``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (DegeneratePair, NegativeDensity, NotSimplyConnected, PointNotInDomain,
                     PunctureValue, RadiusOutOfField)
from .geometry import (Annulus, Disk, ExteriorDisk, HalfPlane, Polygon, PuncturedPlane,
                       base_of, boundary_distance, boundary_sample, contains, hausdorff, punctured,
                       punctures_of)
from .liouville import DensityField, SolverConfig, solve_density

__all__ = [
    "HurwitzEstimate", "ContinuityReport", "hurwitz_simply_connected", "hurwitz_punctured_plane",
    "hurwitz_extract", "hurwitz_two_punctures", "hurwitz_general", "continuity_probe",
    "hyperbolic_density", "solve_cached", "DEFAULT_FIELD_RADII",
]

#: extraction radii for grid fields, as fractions of the cusp patch radius
DEFAULT_FIELD_RADII = (4e-3, 2e-3, 1e-3)
N_ANGLES = 32


@dataclass(frozen=True)
class HurwitzEstimate:
    """Hurwitz density value with its provenance.

    ``extrapolation_error`` is the largest deviation of the extraction
    samples from the fitted line; ``discretization_error`` is the solver's
    Richardson estimate for ``log(density)`` (NaN when unavailable).  Both
    are errors in ``log(eta)``, i.e. relative errors of ``value``.
    """

    value: float
    radii: tuple = ()
    extrapolation_error: float = 0.0
    source: str = "closed_form"
    discretization_error: float = 0.0
    samples: tuple = ()

    @property
    def relative_error(self) -> float:
        d = self.discretization_error
        return self.extrapolation_error + (0.0 if not math.isfinite(d) else d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        d["samples"] = list(self.samples)
        d["relative_error"] = self.relative_error
        return d


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------

@functools.lru_cache(maxsize=6)
def solve_cached(domain, config: SolverConfig = SolverConfig()) -> DensityField:
    """:func:`solve_density` with a small memo (domains and configs are hashable)."""
    return solve_density(domain, config)


def hyperbolic_density(dom, w, config: SolverConfig = SolverConfig()):
    """Hyperbolic density ``lambda_dom(w)`` and its relative error estimate.

    Closed forms: disk, half-plane, annulus, exterior disk, twice-punctured
    plane.  Everything else is solved on a grid.
    """
    from .modular import density_two_punctures

    w = complex(w)
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    P = punctures_of(dom)
    base = base_of(dom)
    if not P:
        if isinstance(base, Disk):
            R = base.radius
            return 2 * R / (R * R - abs(w - base.center) ** 2), 0.0
        if isinstance(base, HalfPlane):
            return 1.0 / boundary_distance(base, w), 0.0
        if isinstance(base, Annulus):
            W = math.log(base.outer / base.inner)
            r = abs(w - base.center)
            return math.pi / (r * W * math.sin(math.pi * math.log(r / base.inner) / W)), 0.0
        if isinstance(base, ExteriorDisk):
            r = abs(w - base.center)
            return 1.0 / (r * math.log(r / base.radius)), 0.0
    if base is None and len(P) == 2:
        return float(density_two_punctures(P[0], P[1], w)), 0.0
    field = solve_cached(dom, config)
    err = field.estimated_discretization_error
    return float(field(w)), (0.0 if not math.isfinite(err) else err)


def hurwitz_simply_connected(dom, w, config: SolverConfig = SolverConfig()) -> HurwitzEstimate:
    """Hurwitz density on a simply connected domain, where it equals ``lambda``."""
    w = complex(w)
    if punctures_of(dom) or not isinstance(dom, (Disk, HalfPlane, Polygon)):
        raise NotSimplyConnected(f"{type(dom).__name__} is not simply connected")
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    lam, err = hyperbolic_density(dom, w, config)
    source = "closed_form" if isinstance(dom, (Disk, HalfPlane)) else "grid"
    return HurwitzEstimate(lam, source=source, discretization_error=err)


def hurwitz_punctured_plane(p, w) -> HurwitzEstimate:
    """``eta_{C - {p}}(w) = 1/(8|w - p|)``."""
    p, w = complex(p), complex(w)
    if w == p:
        raise PunctureValue("the evaluation point is the puncture")
    return HurwitzEstimate(1.0 / (8 * abs(w - p)))


# ----------------------------------------------------------------------
# extraction
# ----------------------------------------------------------------------

def _density_on(lam, Z):
    if isinstance(lam, DensityField):
        u = lam.log_density(Z)
        if np.any(~np.isfinite(u)):
            bad = Z[~np.isfinite(u)][0]
            raise RadiusOutOfField(f"circle point {complex(bad):.6g} is outside the field")
        return np.exp(u)
    try:
        vals = np.asarray(lam(Z), dtype=float)
        if vals.shape != Z.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([float(lam(z)) for z in Z])
    return vals


def default_radii(field: DensityField, w) -> tuple:
    """Radii inside the cusp patch that the grid solver places at ``w``."""
    try:
        patch = field.layout.cusp_patch(complex(w))
    except KeyError:
        raise RadiusOutOfField(f"the field has no cusp patch at {complex(w)}") from None
    return tuple(f * patch.r_out for f in DEFAULT_FIELD_RADII)


def hurwitz_extract(lam, w, radii=None, n_angles: int = N_ANGLES) -> HurwitzEstimate:
    """Hurwitz density at ``w`` from the hyperbolic density of the punctured domain.

    Parameters
    ----------
    lam
        :class:`DensityField` of ``Omega`` minus ``w``, or a callable giving
        that density (vectorised callables are used as such).
    w
        the removed point.
    radii
        strictly decreasing circle radii; for a field the default is a set of
        radii inside the cusp patch at ``w``.

    Returns
    -------
    HurwitzEstimate
        ``value = 2 exp(-E0)`` with ``E0`` the intercept of the least-squares
        line through ``E(r) = mean 1/(r lam) + log r``.
    """
    w = complex(w)
    if radii is None:
        if not isinstance(lam, DensityField):
            raise ValueError("radii are required for a density callable")
        radii = default_radii(lam, w)
    radii = tuple(float(r) for r in radii)
    if len(radii) < 2 or any(not (a > b > 0) for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive, strictly decreasing and at least two")
    theta = 2 * math.pi * (np.arange(n_angles) + 0.5) / n_angles
    ring = np.exp(1j * theta)
    E = []
    for r in radii:
        vals = _density_on(lam, w + r * ring)
        if np.any(~(vals > 0)) or np.any(~np.isfinite(vals)):
            raise NegativeDensity(f"non-positive or non-finite density on the circle of radius {r}")
        E.append(float(np.mean(1.0 / (r * vals))) + math.log(r))
    E = np.array(E)
    rr = np.array(radii)
    slope, icpt = np.polyfit(rr, E, 1)
    dev = float(np.max(np.abs(E - (icpt + slope * rr))))
    disc = float("nan")
    if isinstance(lam, DensityField):
        disc = lam.estimated_discretization_error
    return HurwitzEstimate(2 * math.exp(-icpt), radii, dev, "extraction", disc, tuple(float(e) for e in E))


def hurwitz_two_punctures(a, b, w, config: SolverConfig = SolverConfig()) -> HurwitzEstimate:
    """``eta_{C - {a, b}}(w)`` by a grid solve on ``C - {0, 1, w'}`` and extraction.

    ``w' = (w - a)/(b - a)``; the value scales back by ``1/|b - a|``.
    """
    a, b, w = complex(a), complex(b), complex(w)
    if a == b:
        raise DegeneratePair("the two punctures coincide")
    if w in (a, b):
        raise PunctureValue("the evaluation point is a puncture")
    wn = (w - a) / (b - a)
    est = _extract_cached(PuncturedPlane((0j, 1 + 0j)), wn, config)
    s = 1.0 / abs(b - a)
    return HurwitzEstimate(est.value * s, tuple(r / s for r in est.radii), est.extrapolation_error,
                           est.source, est.discretization_error, est.samples)


@functools.lru_cache(maxsize=256)
def _extract_cached(dom, w: complex, config: SolverConfig) -> HurwitzEstimate:
    field = solve_density(punctured(dom, w), config)
    return hurwitz_extract(field, w)


def _canonical_point(dom, w: complex) -> complex:
    """Rotate ``w`` onto the positive axis for rotationally symmetric domains."""
    if isinstance(dom, (Annulus, ExteriorDisk, Disk)):
        return dom.center + abs(w - dom.center)
    return w


def hurwitz_general(dom, w, config: SolverConfig = SolverConfig()) -> HurwitzEstimate:
    """Hurwitz density of any supported domain.

    Dispatch: simply connected closed forms, once-punctured planes, twice
    punctured planes (:func:`hurwitz_two_punctures`), otherwise a grid solve
    of the punctured domain followed by extraction.
    """
    w = complex(w)
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    P = punctures_of(dom)
    base = base_of(dom)
    if not P and isinstance(base, (Disk, HalfPlane, Polygon)):
        return hurwitz_simply_connected(dom, w, config)
    if base is None and len(P) == 1:
        return hurwitz_punctured_plane(P[0], w)
    if base is None and len(P) == 2:
        return hurwitz_two_punctures(P[0], P[1], w, config)
    return _extract_cached(dom, _canonical_point(dom, w), config)


# ----------------------------------------------------------------------
# continuity
# ----------------------------------------------------------------------

@dataclass
class ContinuityReport:
    """Hurwitz density along ``w_n -> w``.

    ``deviations[n] = |eta(w_n) - eta(w)|``; the verdict asks the tail half
    of the sequence to stay below ``tolerance * eta(w)`` (plus the combined
    error bars) with the deviations non-increasing up to those error bars.
    ``hausdorff`` holds ``(H(boundary with w_n, boundary with w), |w_n - w|)``.
    """

    point: complex
    eta: HurwitzEstimate
    sequence: list
    estimates: list
    deviations: list
    hausdorff: list = field(default_factory=list)
    tolerance: float = 1e-2
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "eta": self.eta.to_dict(),
            "sequence": [[z.real, z.imag] for z in self.sequence],
            "estimates": [e.to_dict() for e in self.estimates],
            "deviations": list(self.deviations),
            "hausdorff": [list(h) for h in self.hausdorff],
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def continuity_probe(dom, w, sequence, config: SolverConfig = SolverConfig(),
                     tolerance: float = 1e-2, n_boundary: int = 64) -> ContinuityReport:
    """Evaluate ``eta`` along a sequence and check convergence to ``eta(w)``."""
    w = complex(w)
    seq = [complex(z) for z in sequence]
    eta = hurwitz_general(dom, w, config)
    ests = [hurwitz_general(dom, z, config) for z in seq]
    dev = [abs(e.value - eta.value) for e in ests]
    tail = range(len(seq) // 2, len(seq))
    ok = True
    for n in tail:
        bar = (ests[n].relative_error * ests[n].value + eta.relative_error * eta.value)
        ok &= dev[n] <= tolerance * eta.value + bar
    B = boundary_sample(dom, n_boundary).as_array() if not isinstance(dom, PuncturedPlane) else \
        np.array(punctures_of(dom), dtype=complex)
    hs = []
    for z in seq:
        H = hausdorff(np.append(B, z), np.append(B, w))
        hs.append((float(H), abs(z - w)))
    return ContinuityReport(w, eta, seq, ests, dev, hs, tolerance, bool(ok))

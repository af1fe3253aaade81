"""Planar domains, boundary distance, boundary sampling and Hausdorff distance.

Points are Python ``complex`` numbers throughout.  Domains are immutable
dataclasses; every variant is open (boundary points are not contained).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DuplicatePuncture, EmptySet, InvalidDomain, PointNotInDomain

__all__ = [
    "Disk", "HalfPlane", "Annulus", "ExteriorDisk", "Polygon", "PuncturedPlane",
    "WithPunctures", "Domain", "BoundarySample", "ConvergenceReport",
    "contains", "boundary_distance", "nearest_boundary_point", "boundary_sample",
    "hausdorff", "punctured", "boundary_convergence_check", "is_hyperbolic",
    "is_simply_connected", "has_connected_boundary", "punctures_of", "base_of",
    "on_boundary", "in_complement", "complement_samples", "project_to_complement", "affine_image",
    "interior_points", "domain_to_dict", "domain_from_dict", "is_bounded",
]

_TWO_PI = 2 * math.pi


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def _check_point(z, what="point") -> complex:
    z = complex(z)
    if not _finite(z):
        raise InvalidDomain(f"{what} must be finite, got {z}")
    return z


@dataclass(frozen=True)
class Disk:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _check_point(self.center, "center"))
        if not self.radius > 0:
            raise InvalidDomain("radius must be positive")


@dataclass(frozen=True)
class HalfPlane:
    """``{z : Re(z * exp(-i*angle)) > offset}``; ``angle`` is the inward normal."""

    angle: float = math.pi / 2
    offset: float = 0.0

    @property
    def normal(self) -> complex:
        return cmath.exp(1j * self.angle)


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float
    center: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "center", _check_point(self.center, "center"))
        if not 0 < self.inner < self.outer:
            raise InvalidDomain("annulus needs 0 < inner < outer")


@dataclass(frozen=True)
class ExteriorDisk:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _check_point(self.center, "center"))
        if not self.radius > 0:
            raise InvalidDomain("radius must be positive")


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b - a).conjugate() * (c - a)
        return v.imag

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 and d2 and d3 and d4:
        return True
    return False


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its vertices (either orientation)."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(_check_point(v, "vertex") for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n < 3:
            raise InvalidDomain("polygon needs at least 3 vertices")
        if len(set(vs)) != n:
            raise InvalidDomain("polygon vertices must be distinct")
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n]):
                    raise InvalidDomain("polygon is not simple")
        if abs(self.signed_area) == 0:
            raise InvalidDomain("degenerate polygon")

    @property
    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @property
    def signed_area(self) -> float:
        vs = self.vertices
        return 0.5 * sum((vs[i].conjugate() * vs[(i + 1) % len(vs)]).imag for i in range(len(vs)))

    @property
    def perimeter(self) -> float:
        return sum(abs(b - a) for a, b in self.edges)


def _puncture_tuple(ps) -> tuple:
    pts = tuple(_check_point(p, "puncture") for p in ps)
    if len(set(pts)) != len(pts):
        raise DuplicatePuncture("puncture list has repeated points")
    return pts


@dataclass(frozen=True)
class PuncturedPlane:
    punctures: tuple

    def __post_init__(self):
        object.__setattr__(self, "punctures", _puncture_tuple(self.punctures))


@dataclass(frozen=True)
class WithPunctures:
    base: "Domain"
    punctures: tuple

    def __post_init__(self):
        pts = _puncture_tuple(self.punctures)
        object.__setattr__(self, "punctures", pts)
        if isinstance(self.base, (WithPunctures, PuncturedPlane)):
            raise InvalidDomain("nest punctures through punctured(), not WithPunctures")
        for p in pts:
            if not contains(self.base, p):
                raise InvalidDomain(f"puncture {p} is not inside the base domain")


Domain = Union[Disk, HalfPlane, Annulus, ExteriorDisk, Polygon, PuncturedPlane, WithPunctures]


def base_of(dom: Domain):
    """The puncture-free part of ``dom`` (None for a punctured plane)."""
    if isinstance(dom, WithPunctures):
        return dom.base
    if isinstance(dom, PuncturedPlane):
        return None
    return dom


def punctures_of(dom: Domain) -> tuple:
    if isinstance(dom, (WithPunctures, PuncturedPlane)):
        return dom.punctures
    return ()


# --------------------------------------------------------------------------
# membership and distance
# --------------------------------------------------------------------------

def _polygon_edge_distance(poly: Polygon, w: complex):
    best = math.inf
    best_pts = []
    for a, b in poly.edges:
        d = b - a
        t = ((w - a) * d.conjugate()).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        p = a + t * d
        dist = abs(w - p)
        tol = 1e-15 * max(1.0, dist)
        if dist < best - tol:
            best = dist
            best_pts = [p]
        elif abs(dist - best) <= tol:
            best_pts.append(p)
    return best, best_pts


def _point_in_polygon(poly: Polygon, w: complex) -> bool:
    inside = False
    vs = poly.vertices
    n = len(vs)
    x, y = w.real, w.imag
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if (a.imag > y) != (b.imag > y):
            xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if x < xc:
                inside = not inside
    return inside


def contains(dom: Domain, w) -> bool:
    """True iff ``w`` lies in the open domain."""
    w = complex(w)
    if not _finite(w):
        return False
    if isinstance(dom, Disk):
        return abs(w - dom.center) < dom.radius
    if isinstance(dom, HalfPlane):
        return (w * dom.normal.conjugate()).real > dom.offset
    if isinstance(dom, Annulus):
        r = abs(w - dom.center)
        return dom.inner < r < dom.outer
    if isinstance(dom, ExteriorDisk):
        return abs(w - dom.center) > dom.radius
    if isinstance(dom, Polygon):
        if _polygon_edge_distance(dom, w)[0] == 0:
            return False
        return _point_in_polygon(dom, w)
    if isinstance(dom, PuncturedPlane):
        return w not in dom.punctures
    if isinstance(dom, WithPunctures):
        return w not in dom.punctures and contains(dom.base, w)
    raise TypeError(f"not a domain: {dom!r}")


def _require_inside(dom, w):
    w = complex(w)
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in {dom}")
    return w


def _base_distance(dom, w):
    if isinstance(dom, Disk):
        return dom.radius - abs(w - dom.center)
    if isinstance(dom, HalfPlane):
        return (w * dom.normal.conjugate()).real - dom.offset
    if isinstance(dom, Annulus):
        r = abs(w - dom.center)
        return min(r - dom.inner, dom.outer - r)
    if isinstance(dom, ExteriorDisk):
        return abs(w - dom.center) - dom.radius
    if isinstance(dom, Polygon):
        return _polygon_edge_distance(dom, w)[0]
    raise TypeError(dom)


def boundary_distance(dom: Domain, w) -> float:
    """Euclidean distance from ``w`` to the complement of ``dom``."""
    w = _require_inside(dom, w)
    ps = punctures_of(dom)
    base = base_of(dom)
    d = _base_distance(base, w) if base is not None else math.inf
    for p in ps:
        d = min(d, abs(w - p))
    return d


def _angle_key(w, p):
    z = p - w
    a = math.atan2(z.imag, z.real)  # cmath.phase overflows on subnormal parts
    return a + _TWO_PI if a < 0 else a


def _base_candidates(dom, w):
    if isinstance(dom, (Disk, ExteriorDisk)):
        v = w - dom.center
        u = v / abs(v) if v != 0 else 1.0
        return [dom.center + dom.radius * u]
    if isinstance(dom, HalfPlane):
        n = dom.normal
        return [w - ((w * n.conjugate()).real - dom.offset) * n]
    if isinstance(dom, Annulus):
        v = w - dom.center
        u = v / abs(v)
        return [dom.center + dom.inner * u, dom.center + dom.outer * u]
    if isinstance(dom, Polygon):
        return _polygon_edge_distance(dom, w)[1]
    raise TypeError(dom)


def nearest_boundary_point(dom: Domain, w) -> complex:
    """A boundary point at distance ``boundary_distance(dom, w)`` from ``w``.

    Ties are broken by the smallest angle of ``p - w`` measured from the
    positive real axis in ``[0, 2 pi)``.
    """
    w = _require_inside(dom, w)
    d = boundary_distance(dom, w)
    base = base_of(dom)
    cands = list(punctures_of(dom))
    if base is not None:
        cands += _base_candidates(base, w)
    tol = 1e-12 * max(1.0, d)
    close = [p for p in cands if abs(abs(p - w) - d) <= tol]
    if not close:
        close = [min(cands, key=lambda p: abs(p - w))]
    return min(close, key=lambda p: (_angle_key(w, p), p.real, p.imag))


def on_boundary(dom: Domain, z, tol: float = 1e-12) -> bool:
    z = complex(z)
    if z in punctures_of(dom):
        return True
    base = base_of(dom)
    if base is None:
        return False
    if isinstance(base, (Disk, ExteriorDisk)):
        return abs(abs(z - base.center) - base.radius) <= tol * max(1.0, base.radius)
    if isinstance(base, HalfPlane):
        return abs((z * base.normal.conjugate()).real - base.offset) <= tol * max(1.0, abs(z))
    if isinstance(base, Annulus):
        r = abs(z - base.center)
        return min(abs(r - base.inner), abs(r - base.outer)) <= tol * max(1.0, base.outer)
    if isinstance(base, Polygon):
        return _polygon_edge_distance(base, z)[0] <= tol * max(1.0, abs(z))
    raise TypeError(base)


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

def is_bounded(dom: Domain) -> bool:
    base = base_of(dom)
    return isinstance(base, (Disk, Annulus, Polygon))


def is_hyperbolic(dom: Domain) -> bool:
    """Complement has at least two points."""
    if isinstance(dom, PuncturedPlane):
        return len(dom.punctures) >= 2
    return True


def is_simply_connected(dom: Domain) -> bool:
    return isinstance(dom, (Disk, HalfPlane, Polygon))


def has_connected_boundary(dom: Domain) -> bool:
    if isinstance(dom, (Disk, HalfPlane, Polygon, ExteriorDisk)):
        return True
    if isinstance(dom, PuncturedPlane):
        return len(dom.punctures) == 1
    return False


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySample:
    """Boundary points with the id of the boundary component each belongs to."""

    points: tuple
    component: tuple

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def _curve_components(base):
    """List of ('circle', c, r) / ('polygon', verts) / ('line', hp) curves."""
    if base is None:
        return []
    if isinstance(base, (Disk, ExteriorDisk)):
        return [("circle", base.center, base.radius)]
    if isinstance(base, Annulus):
        return [("circle", base.center, base.inner), ("circle", base.center, base.outer)]
    if isinstance(base, Polygon):
        return [("polygon", base.vertices)]
    if isinstance(base, HalfPlane):
        return [("line", base)]
    raise TypeError(base)


def _sample_curve(comp, k, line_halfwidth=10.0):
    kind = comp[0]
    if kind == "circle":
        _, c, r = comp
        return [c + r * cmath.exp(_TWO_PI * 1j * j / k) for j in range(k)]
    if kind == "polygon":
        vs = comp[1]
        n = len(vs)
        lengths = [abs(vs[(i + 1) % n] - vs[i]) for i in range(n)]
        total = sum(lengths)
        out = []
        for j in range(k):
            s = total * j / k
            i = 0
            while s > lengths[i] and i < n - 1:
                s -= lengths[i]
                i += 1
            a, b = vs[i], vs[(i + 1) % n]
            out.append(a + (b - a) * (s / lengths[i]))
        return out
    if kind == "line":
        hp = comp[1]
        n = hp.normal
        foot = hp.offset * n
        tangent = 1j * n
        if k == 1:
            return [foot]
        return [foot + tangent * line_halfwidth * (2 * j / (k - 1) - 1) for j in range(k)]
    raise ValueError(kind)


def boundary_sample(dom: Domain, n: int, line_halfwidth: float = 10.0) -> BoundarySample:
    """Quasi-uniform boundary sample of ``n`` points.

    Each puncture is its own component and contributes exactly one point; the
    remaining points are split evenly across curve components and spaced
    uniformly in arclength along each.
    """
    ps = punctures_of(dom)
    curves = _curve_components(base_of(dom))
    ncomp = len(ps) + len(curves)
    if n < ncomp:
        raise ValueError(f"need at least {ncomp} samples, one per boundary component")
    points = []
    comp = []
    rest = n - len(ps)
    for ci, c in enumerate(curves):
        k = rest // len(curves) + (1 if ci < rest % len(curves) else 0)
        pts = _sample_curve(c, k, line_halfwidth)
        points += pts
        comp += [ci] * len(pts)
    for j, p in enumerate(ps):
        points.append(p)
        comp.append(len(curves) + j)
    return BoundarySample(tuple(points), tuple(comp))


def complement_samples(dom: Domain, n_boundary: int = 64, n_interior: int = 32) -> np.ndarray:
    """Points of the closed complement: boundary samples plus interior points
    of bounded complement components (the hole of an annulus or exterior
    disk)."""
    pts = list(boundary_sample(dom, max(n_boundary, len(punctures_of(dom)) + 1)).points)
    base = base_of(dom)
    hole = None
    if isinstance(base, ExteriorDisk):
        hole = (base.center, base.radius)
    elif isinstance(base, Annulus):
        hole = (base.center, base.inner)
    if hole is not None and n_interior > 0:
        c, r = hole
        pts.append(c)
        rings = max(1, int(round(math.sqrt(n_interior / 3))))
        remaining = n_interior - 1
        for i in range(1, rings + 1):
            rad = r * i / (rings + 1)
            k = max(3, remaining // rings)
            pts += [c + rad * cmath.exp(_TWO_PI * 1j * (j + 0.5 * (i % 2)) / k) for j in range(k)]
    return np.asarray(pts, dtype=complex)


def in_complement(dom: Domain, z, tol: float = 1e-12) -> bool:
    """Membership in the closed complement, tolerant to rounding on the boundary."""
    return (not contains(dom, z)) or on_boundary(dom, z, tol)


def project_to_complement(dom: Domain, z) -> complex:
    """``z`` itself if it lies in the closed complement, else the nearest
    boundary point."""
    z = complex(z)
    if not contains(dom, z):
        return z
    return nearest_boundary_point(dom, z)


def interior_points(dom: Domain, n: int = 64) -> list:
    """Deterministic interior points, ordered by decreasing boundary distance."""
    base = base_of(dom)
    ps = punctures_of(dom)
    if isinstance(base, (Disk, Annulus, ExteriorDisk)):
        c = base.center
        R = base.radius if not isinstance(base, Annulus) else base.outer
        lo, hi = c - 2.5 * R * (1 + 1j), c + 2.5 * R * (1 + 1j)
    elif isinstance(base, Polygon):
        xs = [v.real for v in base.vertices]
        ys = [v.imag for v in base.vertices]
        lo, hi = complex(min(xs), min(ys)), complex(max(xs), max(ys))
    else:
        anchors = list(ps) or [0j]
        if isinstance(base, HalfPlane):
            anchors.append(base.offset * base.normal)
        xs = [a.real for a in anchors]
        ys = [a.imag for a in anchors]
        span = max(1.0, max(xs) - min(xs), max(ys) - min(ys))
        lo = complex(min(xs) - span, min(ys) - span)
        hi = complex(max(xs) + span, max(ys) + span)
    m = 41
    xs = np.linspace(lo.real, hi.real, m)
    ys = np.linspace(lo.imag, hi.imag, m)
    cands = [complex(x, y) for y in ys for x in xs]
    cands = [z for z in cands if contains(dom, z)]
    cands.sort(key=lambda z: (-boundary_distance(dom, z), z.real, z.imag))
    return cands[:n]


# --------------------------------------------------------------------------
# set operations
# --------------------------------------------------------------------------

def _as_points(X) -> np.ndarray:
    if isinstance(X, BoundarySample):
        return X.as_array()
    return np.asarray(list(X) if not isinstance(X, np.ndarray) else X, dtype=complex).ravel()


def _directed(X: np.ndarray, Y: np.ndarray, chunk: int = 2048) -> float:
    worst = -1.0
    pair = (0, 0)
    for i in range(0, len(X), chunk):
        D = np.abs(X[i:i + chunk, None] - Y[None, :])
        j = D.argmin(axis=1)
        d = D[np.arange(len(j)), j]
        k = int(d.argmax())
        if d[k] > worst:
            worst = float(d[k])
            pair = (i + k, int(j[k]))
    # recompute the winning distance with the scalar abs so that results
    # agree bit for bit with abs(x - y) on Python complex numbers
    return abs(complex(X[pair[0]]) - complex(Y[pair[1]]))


def hausdorff(X, Y) -> float:
    """Hausdorff distance ``max(sup_x d(x, Y), sup_y d(y, X))`` of finite sets."""
    X = _as_points(X)
    Y = _as_points(Y)
    if X.size == 0 or Y.size == 0:
        raise EmptySet("Hausdorff distance needs nonempty sets")
    return max(_directed(X, Y), _directed(Y, X))


def punctured(dom: Domain, w) -> Domain:
    """``dom`` with the point ``w`` removed."""
    w = complex(w)
    if w in punctures_of(dom):
        raise DuplicatePuncture(f"{w} is already a puncture")
    _require_inside(dom, w)
    if isinstance(dom, PuncturedPlane):
        return PuncturedPlane(dom.punctures + (w,))
    if isinstance(dom, WithPunctures):
        return WithPunctures(dom.base, dom.punctures + (w,))
    return WithPunctures(dom, (w,))


@dataclass
class ConvergenceReport:
    """Outcome of a convergence-in-boundary check."""

    hausdorff: list
    hausdorff_ok: bool
    witness: complex | None
    witness_ok: bool
    reasons: list = field(default_factory=list)

    @property
    def converges(self) -> bool:
        return self.hausdorff_ok and self.witness_ok


def is_witness(domains: Sequence[Domain], limit: Domain, w0, max_misses: int = 1) -> bool:
    """``w0`` lies in ``limit`` and in all but at most ``max_misses`` members."""
    if not contains(limit, w0):
        return False
    misses = sum(1 for d in domains if not contains(d, w0))
    return misses <= max_misses


def boundary_convergence_check(domains: Sequence[Domain], limit: Domain, tolerance: float,
                               n_samples: int = 256,
                               candidates: Iterable[complex] | None = None) -> ConvergenceReport:
    """Check the two clauses of convergence in boundary on a finite sequence.

    Clause 1 uses boundary samples of equal size: the tail of Hausdorff
    distances must be non-increasing and end below ``tolerance``.  Clause 2
    looks for a point of ``limit`` that lies in every member of the tail
    (the second half of the sequence).
    """
    domains = list(domains)
    reasons = []
    if not domains:
        return ConvergenceReport([], False, None, False, ["empty sequence"])
    ref = boundary_sample(limit, n_samples)
    hs = [hausdorff(boundary_sample(d, n_samples), ref) for d in domains]
    tail = hs[len(hs) // 2:]
    monotone = all(b <= a + 1e-15 for a, b in zip(tail, tail[1:]))
    h_ok = monotone and hs[-1] <= tolerance
    if not monotone:
        reasons.append("Hausdorff distances are not decreasing")
    if hs[-1] > tolerance:
        reasons.append(f"final Hausdorff distance {hs[-1]:.3g} exceeds tolerance")
    cands = list(candidates) if candidates is not None else interior_points(limit, 64)
    # a finite sequence has no "all but finitely many"; use the tail half
    tail_doms = domains[len(domains) // 2:]
    witness = None
    for c in cands:
        if contains(limit, c) and all(contains(d, c) for d in tail_doms):
            witness = complex(c)
            break
    if witness is None:
        reasons.append("no common interior point found")
    return ConvergenceReport(hs, h_ok, witness, witness is not None, reasons)


# --------------------------------------------------------------------------
# affine maps and serialisation
# --------------------------------------------------------------------------

def affine_image(dom: Domain, alpha, beta) -> Domain:
    """Image of ``dom`` under ``z -> alpha*z + beta`` (``alpha != 0``)."""
    alpha = complex(alpha)
    beta = complex(beta)
    if alpha == 0:
        raise ValueError("affine map needs alpha != 0")
    T = lambda z: alpha * z + beta  # noqa: E731
    s = abs(alpha)
    if isinstance(dom, Disk):
        return Disk(T(dom.center), dom.radius * s)
    if isinstance(dom, ExteriorDisk):
        return ExteriorDisk(T(dom.center), dom.radius * s)
    if isinstance(dom, Annulus):
        return Annulus(dom.inner * s, dom.outer * s, T(dom.center))
    if isinstance(dom, HalfPlane):
        n = dom.normal * alpha / s
        foot = T(dom.offset * dom.normal)
        return HalfPlane(cmath.phase(n), (foot * n.conjugate()).real)
    if isinstance(dom, Polygon):
        return Polygon(tuple(T(v) for v in dom.vertices))
    if isinstance(dom, PuncturedPlane):
        return PuncturedPlane(tuple(T(p) for p in dom.punctures))
    if isinstance(dom, WithPunctures):
        return WithPunctures(affine_image(dom.base, alpha, beta), tuple(T(p) for p in dom.punctures))
    raise TypeError(dom)


def _pt(z: complex) -> list:
    return [z.real, z.imag]


def _unpt(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def domain_to_dict(dom: Domain) -> dict:
    if isinstance(dom, Disk):
        return {"type": "Disk", "center": _pt(dom.center), "radius": dom.radius}
    if isinstance(dom, ExteriorDisk):
        return {"type": "ExteriorDisk", "center": _pt(dom.center), "radius": dom.radius}
    if isinstance(dom, Annulus):
        return {"type": "Annulus", "inner": dom.inner, "outer": dom.outer, "center": _pt(dom.center)}
    if isinstance(dom, HalfPlane):
        return {"type": "HalfPlane", "angle": dom.angle, "offset": dom.offset}
    if isinstance(dom, Polygon):
        return {"type": "Polygon", "vertices": [_pt(v) for v in dom.vertices]}
    if isinstance(dom, PuncturedPlane):
        return {"type": "PuncturedPlane", "punctures": [_pt(p) for p in dom.punctures]}
    if isinstance(dom, WithPunctures):
        return {"type": "WithPunctures", "base": domain_to_dict(dom.base),
                "punctures": [_pt(p) for p in dom.punctures]}
    raise TypeError(dom)


def domain_from_dict(d: dict) -> Domain:
    kind = d["type"]
    if kind == "Disk":
        return Disk(_unpt(d.get("center", 0)), float(d.get("radius", 1.0)))
    if kind == "ExteriorDisk":
        return ExteriorDisk(_unpt(d.get("center", 0)), float(d.get("radius", 1.0)))
    if kind == "Annulus":
        return Annulus(float(d["inner"]), float(d["outer"]), _unpt(d.get("center", 0)))
    if kind == "HalfPlane":
        return HalfPlane(float(d.get("angle", math.pi / 2)), float(d.get("offset", 0.0)))
    if kind == "Polygon":
        return Polygon(tuple(_unpt(v) for v in d["vertices"]))
    if kind == "PuncturedPlane":
        return PuncturedPlane(tuple(_unpt(p) for p in d["punctures"]))
    if kind == "WithPunctures":
        return WithPunctures(domain_from_dict(d["base"]), tuple(_unpt(p) for p in d["punctures"]))
    raise InvalidDomain(f"unknown domain type {kind!r}")

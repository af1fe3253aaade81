"""Construction of the composite grid for a domain.

A *level* is one Cartesian grid together with the patches that hang off it:

* a cusp patch (log-polar, exact cusp condition at its inner end) around
  every puncture resolved on this level;
* a connector patch around every tight cluster of punctures that the level
  cannot resolve; the cluster gets its own finer level inside the connector;
* for unbounded domains the top level is a disc whose outside is covered by
  a log-polar patch running out to infinity.

Overlap geometry: the Cartesian grid is cut out inside ``r_hole`` of every
patch and the patch ends ``ov * ds`` further out (in ``log r``), so that
both sides can interpolate from each other with full bicubic stencils.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidDomain, ResolutionError, UnsupportedDomain
from ..geometry import HalfPlane, base_of, is_hyperbolic, punctures_of
from .boundary import BaseModel
from .grids import DIRICHLET, EXCLUDED, FRINGE, INTERIOR, CartGrid, PolarGrid

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class LayoutParams:
    grid: int = 513
    n_theta: int = 64
    patch_fraction: float = 0.45
    overlap_rows: float = 3.5
    min_hole_nodes: float = 4.0
    cusp_decades: float = 8.0
    far_decades: float = 8.0
    disc_factor: float = 1.6
    far_factor: float = 2.5
    dirichlet_layer: float = 2.0


@dataclass
class _Feature:
    center: complex
    radius: float
    kind: str  # "point", "blob" or "solid"
    members: tuple = ()


@dataclass
class Layout:
    grids: list
    model: BaseModel | None
    punctures: tuple
    params: LayoutParams
    holes: dict = field(default_factory=dict)   # cart grid id -> [(center, r, patch id)]
    cuts: dict = field(default_factory=dict)    # cart grid id -> (center, r, patch id)
    n_unknowns: int = 0

    def cusp_patch(self, p) -> PolarGrid:
        p = complex(p)
        for g in self.grids:
            if g.kind == "polar" and g.role == "cusp" and g.center == p:
                return g
        raise KeyError(p)


# ----------------------------------------------------------------------
# planning
# ----------------------------------------------------------------------

class _Region:
    """Where a level lives: inside the base domain, or inside a disc."""

    def __init__(self, model=None, center=None, radius=None):
        self.model = model
        self.center = center
        self.radius = radius

    def distance(self, z) -> float:
        if self.model is not None and not self.model.unbounded:
            return float(self.model.distance(np.asarray(z)))
        return self.radius - abs(z - self.center)


def _gap(f, feats, region) -> float:
    g = region.distance(f.center)
    for o in feats:
        if o is f:
            continue
        g = min(g, abs(f.center - o.center) - o.radius)
    return g


def _hole_radius(r_out, h, ds, p: LayoutParams):
    return min(r_out * math.exp(-p.overlap_rows * ds), r_out - 4 * h)


def _blob(points):
    pts = np.array(points, dtype=complex)
    c = complex(0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max()))
    return _Feature(c, float(np.abs(pts - c).max()), "blob", tuple(points))


def _plan(feats, region, h, ds, p: LayoutParams):
    """Patch radii per feature, or the first reason the level fails."""
    plan = []
    for f in feats:
        if f.kind == "solid":
            continue
        gap = _gap(f, feats, region)
        r_out = p.patch_fraction * gap
        r_hole = _hole_radius(r_out, h, ds, p)
        if r_hole < p.min_hole_nodes * h:
            return None, f"feature at {f.center} needs spacing <= {r_out / (p.min_hole_nodes + 4):.3g}, have {h:.3g}"
        if f.kind == "blob":
            r1 = p.disc_factor * f.radius
            if r_hole < r1 * math.exp(2 * p.overlap_rows * ds):
                return None, f"cluster at {f.center} is not separated enough"
        plan.append((f, r_out, r_hole))
    return plan, ""


def _collapse(feats, region, h, ds, p: LayoutParams):
    """Replace maximal well-separated clusters of points by blobs."""
    from scipy.cluster.hierarchy import linkage, to_tree

    pts = [f for f in feats if f.kind == "point"]
    if len(pts) < 2:
        return None
    xy = np.array([[f.center.real, f.center.imag] for f in pts])
    root = to_tree(linkage(xy, method="single"))
    others = [f for f in feats if f.kind != "point"]
    chosen = []

    def ok(node):
        members = [pts[i] for i in node.pre_order()]
        b = _blob([m.center for m in members])
        rest = [f for f in feats if f not in members]
        gap = region.distance(b.center)
        for o in rest:
            gap = min(gap, abs(b.center - o.center) - o.radius)
        r_out = p.patch_fraction * gap
        return _hole_radius(r_out, h, ds, p) >= p.disc_factor * b.radius * math.exp(2 * p.overlap_rows * ds) * 1.05, b

    def visit(node, is_root):
        if node.is_leaf():
            chosen.append(pts[node.id])
            return
        whole = is_root and not others
        if not whole:
            good, b = ok(node)
            if good:
                chosen.append(b)
                return
        visit(node.get_left(), False)
        visit(node.get_right(), False)

    visit(root, True)
    if not any(f.kind == "blob" for f in chosen):
        return None
    return chosen + others


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------

def _cart_for_box(xmin, xmax, ymin, ymax, n, margin_nodes=2):
    span = max(xmax - xmin, ymax - ymin)
    h = span / (n - 1 - 2 * margin_nodes)
    nx = int(math.ceil((xmax - xmin) / h)) + 1 + 2 * margin_nodes
    ny = int(math.ceil((ymax - ymin) / h)) + 1 + 2 * margin_nodes
    x0 = 0.5 * (xmin + xmax) - 0.5 * (nx - 1) * h
    y0 = 0.5 * (ymin + ymax) - 0.5 * (ny - 1) * h
    return CartGrid(x0, y0, h, nx, ny)


class _Builder:
    def __init__(self, model, p: LayoutParams):
        self.model = model
        self.p = p
        self.ds = 2 * math.pi / p.n_theta
        self.grids = []
        self.holes = {}
        self.cuts = {}

    def add(self, g):
        self.grids.append(g)
        return len(self.grids) - 1

    def level(self, feats, region, box, cut_patch=None, top=False):
        p, ds = self.p, self.ds
        cg = _cart_for_box(*box, p.grid)
        plan, why = _plan(feats, region, cg.h, ds, p)
        if plan is None:
            collapsed = _collapse(feats, region, cg.h, ds, p)
            if collapsed is not None:
                plan, why2 = _plan(collapsed, region, cg.h, ds, p)
                why = why2 or why
            if plan is None:
                raise ResolutionError(f"grid {p.grid} too coarse: {why}")
        gid = self.add(cg)
        self.holes[gid] = []
        for f, r_out, r_hole in plan:
            if f.kind == "point":
                n_dec = int(math.ceil(p.cusp_decades * _LN10 / ds))
                s1 = math.log(r_out)
                pg = PolarGrid(f.center, s1 - n_dec * ds, ds, n_dec + 1, p.n_theta,
                               "robin", "fringe", outer_donor=gid, role="cusp")
                pid = self.add(pg)
            else:
                r1 = p.disc_factor * f.radius
                s0 = math.log(r1)
                ns = int(math.ceil((math.log(r_out) - s0) / ds)) + 1
                pg = PolarGrid(f.center, s0, ds, ns, p.n_theta, "fringe", "fringe",
                               outer_donor=gid, role="connector")
                pid = self.add(pg)
                r_cut = r1 * math.exp(p.overlap_rows * ds)
                sub = [_Feature(m, 0.0, "point") for m in f.members]
                child = self.disc_level(sub, f.center, r1, r_cut, pid)
                pg.inner_donor = child
            self.holes[gid].append((f.center, r_hole, pid))
        return gid

    def disc_level(self, feats, center, r1, r_cut, patch_id):
        # Cartesian nodes live inside r_cut; features must stay clear of r1
        region = _Region(center=center, radius=r1)
        L = r_cut
        box = (center.real - L, center.real + L, center.imag - L, center.imag + L)
        cut_region = _Region(center=center, radius=r_cut)
        gid = self.level(feats, region, box, cut_patch=patch_id)
        self.cuts[gid] = (cut_region.center, cut_region.radius, patch_id)
        return gid


_FAR_FACTORS = (2.5, 1.6, 4.0)


def _unbounded(model, base, P, params: LayoutParams, far_factor: float) -> "_Builder":
    b = _Builder(model, params)
    feats = [_Feature(p, 0.0, "point") for p in P]
    if model is not None:
        feats.append(_Feature(base.center, base.radius, "solid"))
    xs = [f.center.real - f.radius for f in feats] + [f.center.real + f.radius for f in feats]
    ys = [f.center.imag - f.radius for f in feats] + [f.center.imag + f.radius for f in feats]
    c = complex(0.5 * (min(xs) + max(xs)), 0.5 * (min(ys) + max(ys)))
    rho = max(abs(f.center - c) + f.radius for f in feats)
    r1 = far_factor * rho
    ds = b.ds
    n_far = int(math.ceil(params.far_decades * _LN10 / ds))
    far = PolarGrid(c, math.log(r1), ds, n_far + 1, params.n_theta, "fringe", "robin", role="far")
    fid = b.add(far)
    r_cut = r1 * math.exp(params.overlap_rows * ds)
    top = b.disc_level(feats, c, r1, r_cut, fid)
    far.inner_donor = top
    return b


def build_layout(domain, params: LayoutParams = LayoutParams()) -> Layout:
    """Composite grid covering ``domain`` (see module docstring)."""
    base = base_of(domain)
    if isinstance(base, HalfPlane):
        raise UnsupportedDomain("half-plane domains have no bounded grid model; use the closed form")
    if not is_hyperbolic(domain):
        raise InvalidDomain("the domain is not hyperbolic")
    model = BaseModel(base) if base is not None else None
    P = punctures_of(domain)
    if model is not None and not model.unbounded:
        b = _Builder(model, params)
        b.level([_Feature(p, 0.0, "point") for p in P], _Region(model=model), model.bbox(), top=True)
    else:
        # the top disc radius trades resolution against room for clusters;
        # try the configured factor first, then the alternatives
        factors = [params.far_factor] + [f for f in _FAR_FACTORS if f != params.far_factor]
        err = None
        for k in factors:
            try:
                b = _unbounded(model, base, P, params, k)
                break
            except ResolutionError as e:
                err = err or e
        else:
            raise err
    lay = Layout(b.grids, model, tuple(P), params, b.holes, b.cuts)
    _finish(lay)
    return lay


# ----------------------------------------------------------------------
# masks and indexing
# ----------------------------------------------------------------------

def _finish(lay: Layout):
    for gid, g in enumerate(lay.grids):
        if g.kind != "cart":
            continue
        Z = g.coords()
        label = np.zeros(Z.shape, dtype=np.int64)
        if lay.model is not None and gid == _top_cart(lay):
            label[~lay.model.contains(Z)] = -1
        for c, rh, pid in lay.holes.get(gid, []):
            label[(label == 0) & (np.abs(Z - c) < rh)] = pid + 1
        if gid in lay.cuts:
            c, rc, pid = lay.cuts[gid]
            label[(label == 0) & (np.abs(Z - c) > rc)] = pid + 1
        active = label == 0
        pad = np.pad(label, 1, constant_values=-2)
        nbs = [pad[1:-1, 2:], pad[1:-1, :-2], pad[2:, 1:-1], pad[:-2, 1:-1]]
        has_out = np.zeros(Z.shape, dtype=bool)
        has_edge = np.zeros(Z.shape, dtype=bool)
        donor = np.zeros(Z.shape, dtype=np.int64)
        for nb in nbs:
            has_out |= nb == -1
            has_edge |= nb == -2
            donor = np.where((donor == 0) & (nb > 0), nb, donor)
        mask = np.where(active, INTERIOR, EXCLUDED).astype(np.int8)
        if lay.model is not None and gid == _top_cart(lay):
            has_out |= lay.model.distance(Z) < lay.params.dirichlet_layer * g.h
        mask[active & has_out] = DIRICHLET
        mask[active & ~has_out & (donor > 0)] = FRINGE
        if np.any(active & has_edge & (mask == INTERIOR)):
            raise ResolutionError("active nodes touch the edge of a Cartesian grid")
        g.mask = mask
        g.label = label
        g.fringe_donor = np.where(mask == FRINGE, donor - 1, -1)
        dv = np.zeros(Z.shape)
        sel = mask == DIRICHLET
        if lay.model is not None and np.any(sel):
            dv[sel] = lay.model.dirichlet_value(Z[sel], g.h)
        g.dirichlet_value = dv
    off = 0
    for g in lay.grids:
        off = g.assign_index(off)
    lay.n_unknowns = off


def _top_cart(lay: Layout) -> int:
    for gid, g in enumerate(lay.grids):
        if g.kind == "cart":
            return gid
    raise RuntimeError("layout without a Cartesian grid")

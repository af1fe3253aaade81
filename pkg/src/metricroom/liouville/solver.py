"""Damped Newton solver for ``Laplace(u) = exp(2u)`` on a composite grid.

Equations per node kind (all grids share one unknown vector ``x``):

* Cartesian interior, 5-point stencil scaled by ``h**2``:
  ``sum(nb) - 4x - h**2 exp(2x) = 0``.
* Log-polar interior with ``ds = dtheta``: the same stencil in ``(s, theta)``.
* Cusp ends of log-polar grids: ``U_s = exp(U)`` (inner end at a puncture),
  ``U_s = -exp(U)`` (outer end at infinity), discretised at the midpoint of
  the first cell.  Both are exact for the rotationally symmetric cusp
  ``U = -log(A -+ s)`` and carry no length scale.
* Dirichlet nodes (first layer inside a smooth boundary): boundary model.
* Fringe nodes: bicubic interpolation from the donor grid, converted between
  ``u`` and ``U = u + log|z - c|`` with the exact logarithm at the node.

The initial iterate is a supersolution (the minimum of comparison densities
of discs and punctured discs contained in the domain); from above, Newton
iterates for this convex problem decrease monotonically to the solution.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import NewtonDivergence, OutOfField, ResolutionError
from ..geometry import base_of, punctures_of
from .grids import DIRICHLET, EXCLUDED, FRINGE, INTERIOR
from .layout import Layout, LayoutParams, build_layout

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Discretisation and Newton settings.

    grid
        nodes per side of every Cartesian level.
    n_theta
        angular nodes of the log-polar patches (radial step equals the
        angular step).
    newton_tolerance
        bound on the relative residual ``|Lu - exp(2u)| / exp(2u)``.
    nested
        solve on a grid of half the resolution first and use it as the
        initial iterate; the two solutions also give the Richardson error
        estimate.
    """

    grid: int = 513
    n_theta: int = 64
    newton_tolerance: float = 1e-8
    max_newton_iters: int = 60
    damping: float = 1.0
    nested: bool = True
    patch_fraction: float = 0.45
    overlap_rows: float = 3.5
    min_hole_nodes: float = 4.0
    cusp_decades: float = 8.0
    far_decades: float = 8.0
    disc_factor: float = 1.6
    far_factor: float = 2.5
    dirichlet_layer: float = 2.0

    def layout_params(self) -> LayoutParams:
        return LayoutParams(self.grid, self.n_theta, self.patch_fraction, self.overlap_rows,
                            self.min_hole_nodes, self.cusp_decades, self.far_decades, self.disc_factor,
                            self.far_factor, self.dirichlet_layer)

    def coarsened(self) -> "SolverConfig":
        return replace(self, grid=(self.grid - 1) // 2 + 1, n_theta=self.n_theta // 2, nested=False)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class DensityField:
    """Solution of the curvature equation on a composite grid.

    ``x`` holds the unknowns of all component grids (``u`` on Cartesian
    grids, ``u + log r`` on log-polar grids).  ``node_error`` is the
    Richardson estimate ``|u_h - u_2h| / 3`` per unknown (NaN when no
    coarse solution was computed).
    """

    domain: object
    layout: Layout
    x: np.ndarray
    config: SolverConfig
    convergence_residual: float
    estimated_discretization_error: float
    residual_history: list = field(default_factory=list)
    node_error: np.ndarray | None = None
    solve_seconds: float = 0.0

    @property
    def grids(self):
        return self.layout.grids

    @property
    def h(self) -> float:
        return min(g.h for g in self.layout.grids if g.kind == "cart")

    def log_density(self, z, with_spacing: bool = False):
        return _evaluate(self.layout, self.x, z, with_spacing)

    def __call__(self, z):
        return eval_density(self, z)


# ----------------------------------------------------------------------
# the discrete system
# ----------------------------------------------------------------------

class _System:
    def __init__(self, lay: Layout):
        self.lay = lay
        n = lay.n_unknowns
        self.n = n
        K, NB, C = [], [], []
        R0, R1, RC = [], [], []
        DK, DV = [], []
        FK, FI, FW, FS = [], [], [], []
        for gid, g in enumerate(lay.grids):
            if g.kind == "cart":
                I = g.index
                jj, ii = np.nonzero(g.mask == INTERIOR)
                K.append(I[jj, ii])
                NB.append(np.stack([I[jj, ii + 1], I[jj, ii - 1], I[jj + 1, ii], I[jj - 1, ii]], 1))
                C.append(np.full(len(jj), g.h ** 2))
                jd, id_ = np.nonzero(g.mask == DIRICHLET)
                DK.append(I[jd, id_])
                DV.append(g.dirichlet_value[jd, id_])
                Z = g.coords()
                jf, if_ = np.nonzero(g.mask == FRINGE)
                donors = g.fringe_donor[jf, if_]
                for d in np.unique(donors):
                    sel = donors == d
                    z = Z[jf[sel], if_[sel]]
                    self._fringe(FK, FI, FW, FS, I[jf[sel], if_[sel]], z, g, lay.grids[d], gid, d)
            else:
                ns, nt = g.ns, g.nt
                i = np.arange(1, ns - 1)[:, None] * np.ones(nt, dtype=np.int64)[None, :]
                j = np.ones(ns - 2, dtype=np.int64)[:, None] * np.arange(nt)[None, :]
                i, j = i.ravel(), j.ravel()
                K.append(g.gidx(i, j))
                NB.append(np.stack([g.gidx(i + 1, j), g.gidx(i - 1, j), g.gidx(i, j + 1), g.gidx(i, j - 1)], 1))
                C.append(np.full(len(i), g.ds ** 2))
                jt = np.arange(nt)
                Z = g.coords()
                for end, row, nxt in (("inner", 0, 1), ("outer", ns - 1, ns - 2)):
                    kind = getattr(g, end)
                    if kind == "robin":
                        R0.append(g.gidx(np.full(nt, row), jt))
                        R1.append(g.gidx(np.full(nt, nxt), jt))
                        RC.append(np.full(nt, g.ds))
                    else:
                        d = g.inner_donor if end == "inner" else g.outer_donor
                        self._fringe(FK, FI, FW, FS, g.gidx(np.full(nt, row), jt), Z[row], g,
                                     lay.grids[d], gid, d)
        cat = lambda a, shape=(0,), dt=np.int64: np.concatenate(a) if a else np.zeros(shape, dtype=dt)  # noqa: E731
        self.K = cat(K)
        self.NB = cat(NB, (0, 4))
        self.C = cat(C, dt=float)
        self.R0, self.R1, self.RC = cat(R0), cat(R1), cat(RC, dt=float)
        self.DK, self.DV = cat(DK), cat(DV, dt=float)
        self.FK, self.FI, self.FW, self.FS = cat(FK), cat(FI, (0, 16)), cat(FW, (0, 16), float), cat(FS, dt=float)
        # every unknown has exactly one equation
        count = np.zeros(n, dtype=np.int64)
        for arr in (self.K, self.R0, self.DK, self.FK):
            np.add.at(count, arr, 1)
        if not np.all(count == 1):
            raise RuntimeError("inconsistent composite grid: unknowns without a unique equation")
        self._pattern()

    @staticmethod
    def _fringe(FK, FI, FW, FS, k, z, recv, donor, rid, did):
        idx, w, ok = donor.stencil(z)
        if not np.all(ok):
            bad = z[~ok][0]
            raise ResolutionError(
                f"overlap too thin: grid {rid} cannot interpolate from grid {did} at {complex(bad):.4g}")
        FK.append(np.asarray(k))
        FI.append(idx)
        FW.append(w)
        FS.append(recv.off(z) - donor.off(z))

    def _pattern(self):
        K, NB, R0, R1, DK, FK, FI = self.K, self.NB, self.R0, self.R1, self.DK, self.FK, self.FI
        rows = [K, np.repeat(K, 4), R0, R0, DK, FK, np.repeat(FK, 16)]
        cols = [K, NB.ravel(), R0, R1, DK, FK, FI.ravel()]
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        self.n_const = None

    def residual(self, x):
        F = np.empty(self.n)
        S = np.empty(self.n)
        e = np.exp(2 * x[self.K])
        F[self.K] = x[self.NB].sum(1) - 4 * x[self.K] - self.C * e
        S[self.K] = self.C * e
        m = np.exp(0.5 * (x[self.R0] + x[self.R1]))
        F[self.R0] = x[self.R1] - x[self.R0] - self.RC * m
        S[self.R0] = self.RC * m
        F[self.DK] = x[self.DK] - self.DV
        S[self.DK] = 1.0
        F[self.FK] = x[self.FK] - (self.FW * x[self.FI]).sum(1) - self.FS
        S[self.FK] = 1.0
        return F, S

    def jacobian(self, x):
        e = np.exp(2 * x[self.K])
        m = np.exp(0.5 * (x[self.R0] + x[self.R1]))
        data = np.concatenate([
            -4 - 2 * self.C * e,
            np.ones(self.NB.size),
            -1 - 0.5 * self.RC * m,
            1 - 0.5 * self.RC * m,
            np.ones(len(self.DK)),
            np.ones(len(self.FK)),
            -self.FW.ravel(),
        ])
        return sp.csc_matrix((data, (self.rows, self.cols)), shape=(self.n, self.n))


# ----------------------------------------------------------------------
# initial iterate and evaluation
# ----------------------------------------------------------------------

def _node_points(lay: Layout):
    pts = np.empty(lay.n_unknowns, dtype=complex)
    off = np.empty(lay.n_unknowns)
    for g in lay.grids:
        z = g.node_points()
        k = slice(g.offset, g.offset + len(z))
        pts[k] = z
        off[k] = g.off(z)
    return pts, off


def supersolution(domain, z):
    """Pointwise upper bound for ``log(density)`` from comparison domains.

    Uses the disc ``B(z, d)`` (bound ``2/d``), the punctured disc around every
    puncture and, for unbounded domains, the exterior of the smallest disc
    containing the complement.
    """
    from .boundary import BaseModel

    z = np.asarray(z, dtype=complex)
    base = base_of(domain)
    P = np.array(punctures_of(domain), dtype=complex)
    model = BaseModel(base) if base is not None else None
    d = np.full(z.shape, np.inf)
    if model is not None:
        d = np.minimum(d, model.distance(z))
    for p in P:
        d = np.minimum(d, np.abs(z - p))
    u = np.log(2 / d)
    for i, p in enumerate(P):
        rho = math.inf
        if model is not None:
            rho = float(model.distance(np.asarray(p)))
        for j, q in enumerate(P):
            if j != i:
                rho = min(rho, abs(p - q))
        r = np.abs(z - p)
        with np.errstate(divide="ignore", invalid="ignore"):
            cusp = -np.log(r * np.log(rho / r))
        u = np.where(r < rho, np.minimum(u, cusp), u)
    if model is None or model.unbounded:
        comp = list(P)
        if model is not None:
            comp_c, comp_r = base.center, base.radius
        else:
            comp_c, comp_r = 0j, 0.0
        pts = np.array(comp + [comp_c], dtype=complex)
        c = complex(0.5 * (pts.real.min() + pts.real.max()), 0.5 * (pts.imag.min() + pts.imag.max()))
        rho = max([abs(q - c) for q in P] + [abs(comp_c - c) + comp_r])
        r = np.abs(z - c)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = -np.log(r * np.log(r / rho))
        u = np.where(r > rho * (1 + 1e-12), np.minimum(u, far), u)
    return u


def _evaluate(lay: Layout, x, z, with_spacing=False):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    best = np.full(z.shape, np.inf)
    val = np.full(z.shape, np.nan)
    for g in lay.grids:
        idx, w, ok = g.stencil(z)
        if g.kind == "cart":
            # stay off the Dirichlet layer, where u is steep
            ok = ok & ~np.any(_is_dirichlet(g, idx), axis=1)
        spc = g.spacing(z)
        take = ok & (spc < best)
        if np.any(take):
            val[take] = (w[take] * x[idx[take]]).sum(1) - g.off(z[take])
            best[take] = spc[take]
    if with_spacing:
        return val, best
    return val


def _is_dirichlet(g, idx):
    flat = np.zeros(g.index.size + 1, dtype=bool)
    act = g.mask != EXCLUDED
    flat[g.index[act] - g.offset] = (g.mask[act] == DIRICHLET)
    loc = idx - g.offset
    loc = np.where((loc >= 0) & (loc < g.n_unknowns), loc, g.index.size)
    return flat[loc]


def eval_density(field: DensityField, z):
    """Density ``exp(u)`` at ``z`` by bicubic interpolation on the best grid.

    Raises :class:`OutOfField` if some point has no full interpolation
    stencil away from the Dirichlet layer.
    """
    scalar = np.ndim(z) == 0
    u = field.log_density(z)
    if np.any(np.isnan(u)):
        bad = np.atleast_1d(np.asarray(z))[np.isnan(u)][0]
        raise OutOfField(f"{complex(bad)} is not covered by the field")
    out = np.exp(u)
    return float(out[0]) if scalar else out


# ----------------------------------------------------------------------
# Newton
# ----------------------------------------------------------------------

_ROUNDOFF_STEP = 1e-11
_FLOOR_FACTOR = 1e3
_MAX_STEP = 4.0


def _newton(system: _System, x, cfg: SolverConfig):
    F, S = system.residual(x)
    res = float(np.max(np.abs(F) / S))
    history = [res]
    for it in range(cfg.max_newton_iters):
        if res <= cfg.newton_tolerance:
            break
        J = system.jacobian(x)
        dx = splu(J, permc_spec="COLAMD").solve(-F)
        if np.max(np.abs(dx)) <= _ROUNDOFF_STEP:
            # the residual sits at its rounding floor: x is converged
            log.debug("newton %d: step below roundoff, residual %.3e", it, res)
            return x, res, history
        # cap the step in log-density units: exp(2u) punishes overshoot
        step = min(cfg.damping, _MAX_STEP / max(float(np.max(np.abs(dx))), 1e-300))
        while True:
            xn = x + step * dx
            Fn, Sn = system.residual(xn)
            rn = float(np.max(np.abs(Fn) / Sn))
            if np.isfinite(rn) and (rn < res or rn <= cfg.newton_tolerance):
                break
            step *= 0.5
            if step < 1e-8:
                if res <= _FLOOR_FACTOR * cfg.newton_tolerance:
                    # no descent left near the rounding floor: accept
                    log.debug("newton %d: stalled at residual %.3e", it, res)
                    return x, res, history
                raise NewtonDivergence(f"residual stuck at {res:.3e} after {it} Newton steps")
        x, F, S, res = xn, Fn, Sn, rn
        history.append(res)
        log.debug("newton %d: step %.3g residual %.3e", it, step, res)
    else:
        if res > cfg.newton_tolerance:
            raise NewtonDivergence(f"residual {res:.3e} after {cfg.max_newton_iters} Newton steps")
    return x, res, history


def _solve_on(domain, lay: Layout, cfg: SolverConfig, x0=None):
    system = _System(lay)
    pts, off = _node_points(lay)
    sup = supersolution(domain, pts) + off
    if x0 is None:
        x0 = sup
    else:
        bad = ~np.isfinite(x0)
        x0 = np.where(bad, sup, x0)
    x0 = np.where(np.isfinite(x0), x0, 0.0)
    # Dirichlet nodes start at their data
    x0[system.DK] = system.DV
    return _newton(system, x0, cfg)


def solve_density(domain, config: SolverConfig = SolverConfig()) -> DensityField:
    """Hyperbolic density of ``domain`` on a composite grid.

    Raises
    ------
    ResolutionError
        if the grid cannot resolve the features of the domain.
    NewtonDivergence
        if the residual cannot be reduced below ``newton_tolerance``.
    """
    t0 = time.perf_counter()
    lay = build_layout(domain, config.layout_params())
    x0 = None
    node_err = None
    coarse = None
    if config.nested and config.grid >= 65 and config.n_theta >= 16:
        try:
            coarse = solve_density(domain, config.coarsened())
        except ResolutionError:
            coarse = None
    if coarse is not None:
        pts, off = _node_points(lay)
        uc = coarse.log_density(pts)
        x0 = uc + off
    x, res, hist = _solve_on(domain, lay, config, x0)
    field = DensityField(domain, lay, x, config, res, float("nan"), hist)
    if coarse is not None:
        pts, off = _node_points(lay)
        node_err = np.abs((x - off) - coarse.log_density(pts)) / 3
        field.node_error = node_err
        field.estimated_discretization_error = _summary_error(lay, node_err)
    field.solve_seconds = time.perf_counter() - t0
    return field


def _summary_error(lay: Layout, node_err):
    """Largest estimate over nodes at least 8 spacings away from a Dirichlet layer."""
    keep = np.zeros(len(node_err), dtype=bool)
    for g in lay.grids:
        if g.kind == "cart":
            sel = g.mask == INTERIOR
            if lay.model is not None and g.dirichlet_value is not None:
                d = lay.model.distance(g.coords())
                sel &= d >= 8 * g.h
            keep[g.index[sel]] = True
        else:
            k = g.gidx(np.arange(1, g.ns - 1)[:, None], np.arange(g.nt)[None, :]).ravel()
            keep[k] = True
    vals = node_err[keep]
    vals = vals[np.isfinite(vals)]
    return float(vals.max()) if vals.size else float("nan")


def refine(field: DensityField) -> DensityField:
    """Re-solve with half the spacing, warm-started from ``field``.

    The returned field carries the Richardson estimate ``|u_h/2 - u_h| / 3``.
    """
    cfg = replace(field.config, grid=2 * (field.config.grid - 1) + 1, n_theta=2 * field.config.n_theta,
                  nested=False)
    t0 = time.perf_counter()
    lay = build_layout(field.domain, cfg.layout_params())
    pts, off = _node_points(lay)
    uc = field.log_density(pts)
    x, res, hist = _solve_on(field.domain, lay, cfg, uc + off)
    new = DensityField(field.domain, lay, x, cfg, res, float("nan"), hist)
    node_err = np.abs((x - off) - uc) / 3
    new.node_error = node_err
    new.estimated_discretization_error = _summary_error(lay, node_err)
    new.solve_seconds = time.perf_counter() - t0
    return new

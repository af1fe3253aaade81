"""Component grids of the composite (overset) discretisation.

Two kinds of component grid cover a domain:

``CartGrid``
    a uniform Cartesian grid carrying ``x = u`` with ``u = log(density)``.
``PolarGrid``
    a log-polar annulus ``s = log|z - c|`` carrying ``x = u + s``.  In these
    variables the curvature equation keeps its form,
    ``U_ss + U_tt = exp(2U)``, and a puncture at ``c`` (or at infinity)
    becomes a smooth end of a half-infinite cylinder.

Every grid exposes ``off(z)``, the shift between its unknown and ``u``
(``x = u + off``), and ``stencil(z)``, a bicubic Lagrange interpolation
stencil into its own unknowns.  Overlap (fringe) nodes of one grid are tied
to interpolated values of another.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EXCLUDED, INTERIOR, DIRICHLET, FRINGE, ROBIN = 0, 1, 2, 3, 4
MASK_NAMES = {EXCLUDED: "excluded", INTERIOR: "interior", DIRICHLET: "dirichlet",
              FRINGE: "fringe", ROBIN: "robin"}

_TWO_PI = 2 * math.pi


def lagrange4(t):
    """Cubic Lagrange weights for nodes at -1, 0, 1, 2 evaluated at ``t``."""
    t = np.asarray(t, dtype=float)
    return np.stack([
        -t * (t - 1) * (t - 2) / 6,
        (t + 1) * (t - 1) * (t - 2) / 2,
        -(t + 1) * t * (t - 2) / 2,
        (t + 1) * t * (t - 1) / 6,
    ], axis=-1)


@dataclass
class CartGrid:
    """Uniform Cartesian component grid.

    Node ``(j, i)`` sits at ``x0 + i*h + 1j*(y0 + j*h)``; arrays are indexed
    ``[j, i]`` (row = y).
    """

    x0: float
    y0: float
    h: float
    nx: int
    ny: int
    mask: np.ndarray = None
    # owner label per node: 0 = active, -1 = outside the domain,
    # k > 0 = inside the hole of grid k - 1 (a patch)
    label: np.ndarray = None
    dirichlet_value: np.ndarray = None
    fringe_donor: np.ndarray = None
    offset: int = 0
    index: np.ndarray = None
    kind: str = field(default="cart", init=False)

    def coords(self):
        xs = self.x0 + self.h * np.arange(self.nx)
        ys = self.y0 + self.h * np.arange(self.ny)
        return xs[None, :] + 1j * ys[:, None]

    def off(self, z):
        return np.zeros(np.shape(z))

    def spacing(self, z):
        return np.full(np.shape(z), self.h)

    @property
    def n_unknowns(self) -> int:
        return int(np.count_nonzero(self.mask != EXCLUDED))

    def assign_index(self, offset: int) -> int:
        self.offset = offset
        self.index = np.full(self.mask.shape, -1, dtype=np.int64)
        active = self.mask != EXCLUDED
        self.index[active] = offset + np.arange(np.count_nonzero(active))
        return offset + np.count_nonzero(active)

    def stencil(self, z):
        """Global indices (m, 16), weights (m, 16) and a validity flag (m,).

        A stencil is valid when all 16 nodes are active (not excluded).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        fx = (z.real - self.x0) / self.h
        fy = (z.imag - self.y0) / self.h
        # far or non-finite points land off-grid and are flagged invalid below
        fx = np.where(np.isfinite(fx), np.clip(fx, -10.0, self.nx + 10.0), -10.0)
        fy = np.where(np.isfinite(fy), np.clip(fy, -10.0, self.ny + 10.0), -10.0)
        i0 = np.floor(fx).astype(np.int64)
        j0 = np.floor(fy).astype(np.int64)
        wx = lagrange4(fx - i0)
        wy = lagrange4(fy - j0)
        ok = (i0 >= 1) & (i0 + 2 <= self.nx - 1) & (j0 >= 1) & (j0 + 2 <= self.ny - 1)
        i0c = np.clip(i0, 1, self.nx - 3)
        j0c = np.clip(j0, 1, self.ny - 3)
        di = np.arange(-1, 3)
        ii = i0c[:, None, None] + di[None, None, :]
        jj = j0c[:, None, None] + di[None, :, None]
        idx = self.index[jj, ii].reshape(len(z), 16)
        w = (wy[:, :, None] * wx[:, None, :]).reshape(len(z), 16)
        ok &= np.all(idx >= 0, axis=1)
        return idx, w, ok

    def node_points(self):
        """Coordinates of the active nodes in global-index order."""
        Z = self.coords()
        return Z[self.mask != EXCLUDED]


@dataclass
class PolarGrid:
    """Log-polar annulus ``s0 <= log|z - c| <= s0 + (ns-1)*ds``, ``nt`` angles.

    ``inner`` and ``outer`` are ``"robin"`` (a cusp end: puncture at ``c``
    for the inner end, at infinity for the outer end) or ``"fringe"``
    (values interpolated from ``inner_donor``/``outer_donor``).
    """

    center: complex
    s0: float
    ds: float
    ns: int
    nt: int
    inner: str
    outer: str
    inner_donor: int = -1
    outer_donor: int = -1
    role: str = "cusp"
    offset: int = 0
    kind: str = field(default="polar", init=False)

    @property
    def dt(self) -> float:
        return _TWO_PI / self.nt

    @property
    def s1(self) -> float:
        return self.s0 + (self.ns - 1) * self.ds

    @property
    def r_in(self) -> float:
        return math.exp(self.s0)

    @property
    def r_out(self) -> float:
        return math.exp(self.s1)

    @property
    def n_unknowns(self) -> int:
        return self.ns * self.nt

    @property
    def mask(self) -> np.ndarray:
        m = np.full((self.ns, self.nt), INTERIOR, dtype=np.int8)
        m[0] = ROBIN if self.inner == "robin" else FRINGE
        m[-1] = ROBIN if self.outer == "robin" else FRINGE
        return m

    def assign_index(self, offset: int) -> int:
        self.offset = offset
        return offset + self.n_unknowns

    def gidx(self, i, j):
        return self.offset + np.asarray(i) * self.nt + np.mod(j, self.nt)

    def coords(self):
        s = self.s0 + self.ds * np.arange(self.ns)
        t = self.dt * np.arange(self.nt)
        return self.center + np.exp(s[:, None] + 1j * t[None, :])

    def node_points(self):
        return self.coords().ravel()

    def off(self, z):
        return np.log(np.abs(np.asarray(z) - self.center))

    def spacing(self, z):
        return np.abs(np.asarray(z) - self.center) * self.ds

    def contains_radius(self, z, margin_rows: float = 1.0):
        s = np.log(np.abs(np.atleast_1d(z) - self.center))
        return (s >= self.s0 + margin_rows * self.ds) & (s <= self.s1 - margin_rows * self.ds)

    def stencil(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        v = z - self.center
        with np.errstate(divide="ignore"):
            fs = (np.log(np.abs(v)) - self.s0) / self.ds
        fs = np.where(np.isfinite(fs), fs, -2.0)
        ft = np.mod(np.angle(v), _TWO_PI) / self.dt
        i0 = np.floor(fs).astype(np.int64)
        j0 = np.floor(ft).astype(np.int64)
        ws = lagrange4(fs - i0)
        wt = lagrange4(ft - j0)
        ok = (i0 >= 1) & (i0 + 2 <= self.ns - 1)
        i0c = np.clip(i0, 1, self.ns - 3)
        di = np.arange(-1, 3)
        ii = i0c[:, None, None] + di[None, :, None]
        jj = j0[:, None, None] + di[None, None, :]
        idx = self.gidx(ii, jj).reshape(len(z), 16)
        w = (ws[:, :, None] * wt[:, None, :]).reshape(len(z), 16)
        return idx, w, ok

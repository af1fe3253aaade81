"""Binary serialisation of a :class:`DensityField` and CSV export.

File layout (every number little-endian)::

    file header
      8 bytes   magic b"MRFIELD\\0"
      u32       format version (1)
      u32       number of component grids G
      f64       convergence residual
      f64       estimated discretisation error (NaN if none)
      u32 L     length of the UTF-8 JSON domain description
      L bytes   domain JSON (same schema as the gallery file)
    G grid records
      u8        kind: 0 = Cartesian, 1 = log-polar
      Cartesian:
        f64 x0, f64 y0, f64 h, u32 nx, u32 ny
            viewport [x0, x0 + (nx-1) h] x [y0, y0 + (ny-1) h]
        u32 R, then R runs of (u8 mask code, u32 run length) covering the
            nx*ny nodes in row-major order (row = y index)
      log-polar:
        f64 cx, f64 cy, f64 s0, f64 ds, u32 ns, u32 nt, u8 inner, u8 outer
            nodes at c + exp(s0 + i ds + 2 pi j i/nt); ends 0 = cusp, 1 = fringe
      u64 M     number of stored nodes
      M f64     u = log(density) at the non-excluded nodes in storage order

Mask codes: 0 excluded, 1 interior, 2 Dirichlet, 3 overlap (fringe),
4 cusp end.
"""
from __future__ import annotations

import csv
import io
import json
import struct

import numpy as np

from ..geometry import domain_from_dict, domain_to_dict
from .grids import DIRICHLET, EXCLUDED, CartGrid, PolarGrid
from .layout import Layout

MAGIC = b"MRFIELD\0"
VERSION = 1


def _runs(mask: np.ndarray):
    flat = mask.ravel()
    if flat.size == 0:
        return []
    edges = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate([[0], edges])
    ends = np.concatenate([edges, [flat.size]])
    return [(int(flat[s]), int(e - s)) for s, e in zip(starts, ends)]


def write_field(field, path) -> None:
    """Write ``field`` in the binary format described in the module docstring."""
    buf = io.BytesIO()
    dom = json.dumps(domain_to_dict(field.domain), sort_keys=True).encode()
    buf.write(MAGIC)
    buf.write(struct.pack("<II", VERSION, len(field.grids)))
    buf.write(struct.pack("<dd", field.convergence_residual, field.estimated_discretization_error))
    buf.write(struct.pack("<I", len(dom)))
    buf.write(dom)
    for g in field.grids:
        z = g.node_points()
        u = field.x[g.offset:g.offset + len(z)] - g.off(z)
        if g.kind == "cart":
            buf.write(struct.pack("<BdddII", 0, g.x0, g.y0, g.h, g.nx, g.ny))
            runs = _runs(g.mask)
            buf.write(struct.pack("<I", len(runs)))
            for code, n in runs:
                buf.write(struct.pack("<BI", code, n))
        else:
            ends = {"robin": 0, "fringe": 1}
            buf.write(struct.pack("<BddddIIBB", 1, g.center.real, g.center.imag, g.s0, g.ds, g.ns, g.nt,
                                  ends[g.inner], ends[g.outer]))
        buf.write(struct.pack("<Q", len(u)))
        buf.write(np.asarray(u, dtype="<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += struct.calcsize(fmt)
        return vals

    def raw(self, n: int) -> bytes:
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out


def read_field(path):
    """Read a field written by :func:`write_field`.

    The returned :class:`DensityField` supports evaluation; solver metadata
    that is not stored (configuration, residual history) is left empty.
    """
    from .solver import DensityField, SolverConfig

    with open(path, "rb") as fh:
        r = _Reader(fh.read())
    if r.raw(8) != MAGIC:
        raise ValueError(f"{path}: not a metricroom field file")
    version, n_grids = r.take("<II")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported field format version {version}")
    residual, est = r.take("<dd")
    (L,) = r.take("<I")
    domain = domain_from_dict(json.loads(r.raw(L).decode()))
    grids, values = [], []
    offset = 0
    for _ in range(n_grids):
        (kind,) = r.take("<B")
        if kind == 0:
            x0, y0, h, nx, ny = r.take("<dddII")
            (nruns,) = r.take("<I")
            codes = [r.take("<BI") for _ in range(nruns)]
            mask = np.concatenate([np.full(n, c, dtype=np.int8) for c, n in codes]).reshape(ny, nx)
            g = CartGrid(x0, y0, h, nx, ny, mask=mask)
        else:
            cx, cy, s0, ds, ns, nt, inner, outer = r.take("<ddddIIBB")
            names = ("robin", "fringe")
            role = "cusp" if inner == 0 else ("far" if outer == 0 else "connector")
            g = PolarGrid(complex(cx, cy), s0, ds, ns, nt, names[inner], names[outer], role=role)
        offset = g.assign_index(offset)
        (m,) = r.take("<Q")
        u = np.frombuffer(r.raw(8 * m), dtype="<f8").astype(float)
        values.append(u + g.off(g.node_points()))
        grids.append(g)
    lay = Layout(grids, None, (), None, {}, {})
    lay.n_unknowns = offset
    x = np.concatenate(values) if values else np.zeros(0)
    return DensityField(domain, lay, x, SolverConfig(), residual, est)


def dump_csv(field, out) -> int:
    """Write ``x, y, lambda`` rows for every interior node; returns the row count.

    ``out`` is a path or a text stream.  Dirichlet and excluded nodes are
    skipped, overlap nodes appear once per grid that carries them.
    """
    own = isinstance(out, (str, bytes)) or hasattr(out, "__fspath__")
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh)
        w.writerow(["x", "y", "lambda"])
        n = 0
        for g in field.grids:
            z = g.node_points()
            u = field.x[g.offset:g.offset + len(z)] - g.off(z)
            keep = (g.mask != EXCLUDED).ravel()
            keep = (g.mask.ravel()[keep] != DIRICHLET)
            for zz, uu in zip(z[keep], u[keep]):
                w.writerow([repr(float(zz.real)), repr(float(zz.imag)), repr(float(np.exp(uu)))])
                n += 1
        return n
    finally:
        if own:
            fh.close()

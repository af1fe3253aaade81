"""Tabulated Hurwitz density of the twice-punctured plane.

``h(t) = eta_{C - {0,1}}(t)`` transforms like ``lambda_{C - {0,1}}`` under the six
anharmonic maps, so the ratio

    g = 8 h(t) / (pi Im(tau) lambda_{C - {0,1}}(t)),

with ``tau`` the principal modulus of the reduced point ``t'`` (smallest
modulus image of ``t``), is a function on the reduced region alone.  In the
coordinates ``v = 1/Im(tau)`` in ``[0, 2/sqrt(3)]`` and ``x = Re(tau)`` in
``[-1/2, 1/2]`` it is smooth, even in ``x`` and tends to 1 as ``v -> 0``
(the once-punctured limit ``1/(8|t|)``).  It is stored as a tensor Chebyshev
interpolant in ``(v, x**2)`` whose nodes come from grid solves of
``C - {0, 1, 1/t}`` followed by extraction at 1.

The table is built once (``python3 -m metricroom.etatable``) and shipped as
package data.
"""
from __future__ import annotations

import functools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import DegeneratePair, PunctureValue
from .modular import anharmonic_reduce, density_C01, modular_lambda, reduced_modulus

log = logging.getLogger(__name__)

V_MAX = 2 / math.sqrt(3)
X_MAX = 0.5
TABLE_FILE = "eta_table.json"
TABLE_VERSION = 1


def tau_coordinates(t):
    """``(v, x, tau)`` of the reduced image of ``t``."""
    tau, _, _ = reduced_modulus(t)
    return 1 / tau.imag, np.abs(tau.real), tau


def lobatto(n: int, a: float, b: float) -> np.ndarray:
    k = np.arange(n)
    return a + (b - a) * (1 - np.cos(np.pi * k / (n - 1))) / 2


@dataclass(frozen=True)
class EtaTable:
    """Chebyshev coefficients of ``g`` plus provenance."""

    coeffs: np.ndarray
    v_nodes: np.ndarray
    x_nodes: np.ndarray
    values: np.ndarray
    node_errors: np.ndarray
    config: dict
    holdout_error: float = float("nan")

    @property
    def error(self) -> float:
        """Relative error bound used downstream: node errors plus holdout deviation."""
        e = float(np.nanmax(self.node_errors)) if self.node_errors.size else 0.0
        return e + (self.holdout_error if math.isfinite(self.holdout_error) else 0.0)

    def g(self, v, x):
        sv = 2 * np.asarray(v) / V_MAX - 1
        sx = 2 * (np.asarray(x) ** 2) / X_MAX ** 2 - 1
        return C.chebval2d(np.clip(sv, -1, 1), np.clip(sx, -1, 1), self.coeffs)

    def to_dict(self) -> dict:
        return {
            "version": TABLE_VERSION,
            "v_max": V_MAX,
            "x_max": X_MAX,
            "v_nodes": self.v_nodes.tolist(),
            "x_nodes": self.x_nodes.tolist(),
            "values": self.values.tolist(),
            "node_errors": self.node_errors.tolist(),
            "coeffs": self.coeffs.tolist(),
            "config": self.config,
            "holdout_error": self.holdout_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EtaTable":
        if d.get("version") != TABLE_VERSION:
            raise ValueError("unsupported eta table version")
        return cls(np.array(d["coeffs"]), np.array(d["v_nodes"]), np.array(d["x_nodes"]),
                   np.array(d["values"]), np.array(d["node_errors"]), d["config"],
                   float(d.get("holdout_error", float("nan"))))


def fit(v_nodes, x_nodes, values) -> np.ndarray:
    """Tensor Chebyshev interpolation coefficients in ``(v, x**2)``."""
    sv = 2 * np.asarray(v_nodes) / V_MAX - 1
    sx = 2 * np.asarray(x_nodes) ** 2 / X_MAX ** 2 - 1
    Vv = C.chebvander(sv, len(sv) - 1)
    Vx = C.chebvander(sx, len(sx) - 1)
    # values[i, j] = sum_kl c[k, l] Vv[i, k] Vx[j, l]
    return np.linalg.solve(Vv, np.linalg.solve(Vx, np.asarray(values).T).T)


@functools.lru_cache(maxsize=1)
def load_table() -> EtaTable:
    """The packaged table, or the file named by ``METRICROOM_ETA_TABLE``."""
    alt = os.environ.get("METRICROOM_ETA_TABLE")
    if alt:
        with open(alt) as fh:
            return EtaTable.from_dict(json.load(fh))
    path = resources.files("metricroom.data").joinpath(TABLE_FILE)
    return EtaTable.from_dict(json.loads(path.read_text()))


def eta_C01(t, table: EtaTable | None = None):
    """Hurwitz density of ``C - {0, 1}`` at ``t`` from the table (vectorised)."""
    arr = np.asarray(t, dtype=complex)
    if np.any((arr == 0) | (arr == 1)):
        raise PunctureValue("eta is undefined at the punctures")
    table = table or load_table()
    v, x, tau = tau_coordinates(arr)
    out = table.g(v, x) * np.pi * tau.imag * np.asarray(density_C01(arr)) / 8
    return float(out) if arr.ndim == 0 else out


def eta_two_punctures(a, b, w, table: EtaTable | None = None):
    """``eta_{C - {a, b}}(w)`` from the table, by affine covariance."""
    a, b = complex(a), complex(b)
    if a == b:
        raise DegeneratePair("the two punctures coincide")
    w = np.asarray(w, dtype=complex)
    if np.any((w == a) | (w == b)):
        raise PunctureValue("the evaluation point is a puncture")
    return eta_C01((w - a) / (b - a), table) / abs(b - a)


# ----------------------------------------------------------------------
# building
# ----------------------------------------------------------------------

def node_value(v: float, x: float, config_dict: dict) -> tuple:
    """``(g, relative error)`` at ``tau = x + i/v`` from a fresh grid solve."""
    from .geometry import PuncturedPlane
    from .hurwitz import hurwitz_extract
    from .liouville import SolverConfig, solve_density

    if v == 0:
        return 1.0, 0.0
    tau = complex(x, 1 / v)
    t = complex(modular_lambda(tau))
    tr, f = anharmonic_reduce(t)
    tr, f = complex(tr), float(f)
    field = solve_density(PuncturedPlane((0j, 1 + 0j, 1 / tr)), SolverConfig(**config_dict))
    est = hurwitz_extract(field, 1)
    h = est.value / abs(tr) * f
    # outside the reduced region this is the smooth continuation of g
    g = 8 * h / (np.pi * tau.imag * float(density_C01(t)))
    return float(g), float(est.relative_error)


def _node_job(args):
    return node_value(*args)


def workers() -> int:
    """Work-pool size from ``METRICROOM_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("METRICROOM_WORKERS", "1")))
    except ValueError:
        return 1


def _load_cache(path) -> dict:
    if path and os.path.exists(path):
        with open(path) as fh:
            return json.load(fh)
    return {}


def build_table(n_v: int = 10, n_x: int = 4, config: dict | None = None,
                holdout: int = 4, seed: int = 0, cache: str | None = None) -> EtaTable:
    """Solve at the tensor nodes, fit, and measure the fit on random holdout points.

    ``cache`` names a JSON file of finished node solves so that an
    interrupted build resumes where it stopped.
    """
    config = dict(config or {"grid": 513})
    v_nodes = lobatto(n_v, 0.0, V_MAX)
    x_nodes = np.sqrt(lobatto(n_x, 0.0, X_MAX ** 2))
    jobs = [(float(v), float(x), config) for v in v_nodes for x in x_nodes]
    done = _load_cache(cache)
    key = lambda j: f"{j[0]!r},{j[1]!r},{json.dumps(j[2], sort_keys=True)}"
    todo = [j for j in jobs if key(j) not in done]
    n = workers()

    def record(j, r):
        done[key(j)] = list(r)
        log.info("node v=%.4f x=%.4f g=%.6f", j[0], j[1], r[0])
        if cache:
            with open(cache, "w") as fh:
                json.dump(done, fh)

    if n > 1:
        with ProcessPoolExecutor(n) as ex:
            for j, r in zip(todo, ex.map(_node_job, todo)):
                record(j, r)
    else:
        for j in todo:
            record(j, _node_job(j))
    res = [done[key(j)] for j in jobs]
    vals = np.array([r[0] for r in res]).reshape(n_v, n_x)
    errs = np.array([r[1] for r in res]).reshape(n_v, n_x)
    table = EtaTable(fit(v_nodes, x_nodes, vals), v_nodes, x_nodes, vals, errs, config)
    if holdout:
        rng = np.random.default_rng(seed)
        dev = 0.0
        for _ in range(holdout):
            v = float(rng.uniform(0.3, V_MAX))
            x = float(rng.uniform(0, X_MAX))
            g, _ = node_value(v, x, config)
            dev = max(dev, abs(float(table.g(v, x)) / g - 1))
            log.info("holdout v=%.4f x=%.4f g=%.6f table=%.6f", v, x, g, float(table.g(v, x)))
        table = EtaTable(table.coeffs, v_nodes, x_nodes, vals, errs, config, dev)
    return table


def main(argv=None) -> int:
    import argparse

    ap = argparse.ArgumentParser(description="build the Hurwitz density table of C - {0,1}")
    ap.add_argument("--n-v", type=int, default=10)
    ap.add_argument("--n-x", type=int, default=4)
    ap.add_argument("--grid", type=int, default=513)
    ap.add_argument("--holdout", type=int, default=4)
    ap.add_argument("--out", default=None)
    ap.add_argument("--cache", default=None, help="JSON file of finished node solves")
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    table = build_table(a.n_v, a.n_x, {"grid": a.grid}, a.holdout, cache=a.cache)
    out = a.out or str(resources.files("metricroom.data").joinpath(TABLE_FILE))
    with open(out, "w") as fh:
        json.dump(table.to_dict(), fh, indent=1)
    print(f"wrote {out}; node error {np.nanmax(table.node_errors):.2e}, holdout {table.holdout_error:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

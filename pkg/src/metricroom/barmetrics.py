"""Suprema over pairs of complement points.

``kappa(w) = sup lambda_{C - {a,b}}(w)``, ``eta_bar(w) = sup eta_{C - {a,b}}(w)`` and
``1/delta_bar(w) = sup 1/delta_{C - {a,b}}(w)``, all over distinct ``a, b`` in the
closed complement.  One optimizer serves all three: exhaustive evaluation on
complement samples, then Nelder-Mead in the four real coordinates of the
pair with every trial point projected onto the complement.

The twice-punctured Hurwitz density comes from the packaged table
(:mod:`metricroom.etatable`), which makes the objective as cheap as the
modular one.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InsufficientComplementSamples, PointNotInDomain
from .etatable import eta_C01, load_table
from .geometry import (boundary_distance, boundary_sample, complement_samples, contains,
                       in_complement, is_bounded, nearest_boundary_point, on_boundary,
                       project_to_complement, affine_image)
from .modular import density_C01

__all__ = [
    "OptimizerBudget", "PairSupremumResult", "pair_supremum", "kappa", "eta_bar", "delta_bar",
    "affine_invariance_check", "lsc_probe", "candidate_points",
]


@dataclass(frozen=True)
class OptimizerBudget:
    """Optimizer settings.

    coarse_pairs
        number of best coarse pairs kept in the trace and tried as starts.
    refine_iters
        objective evaluations per Nelder-Mead round.
    simplex_tolerance
        coordinate tolerance of the simplex.
    """

    coarse_pairs: int = 24
    refine_iters: int = 40
    simplex_tolerance: float = 1e-9
    rounds: int = 2
    n_boundary: int = 64
    n_interior: int = 32
    n_exterior: int = 16

    def __post_init__(self):
        if min(self.coarse_pairs, self.refine_iters, self.rounds) < 1 or self.simplex_tolerance <= 0:
            raise ValueError("budget entries must be positive")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PairSupremumResult:
    """Outcome of a pair supremum.

    ``value`` is the objective at ``argmax_pair``; ``lower``/``upper`` are the
    certified envelopes where known; ``error`` is the relative error of each
    objective evaluation (table error for ``eta_bar``).  ``kappa`` results
    carry no envelopes.
    """

    value: float
    argmax_pair: tuple
    evaluations: int
    attainment_residual: float
    method_trace: list = field(default_factory=list)
    lower: float | None = None
    upper: float | None = None
    error: float = 0.0
    argmax_location: str = ""

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_pair": [[z.real, z.imag] for z in self.argmax_pair],
            "evaluations": self.evaluations,
            "attainment_residual": self.attainment_residual,
            "method_trace": [{"pair": [[a.real, a.imag], [b.real, b.imag]], "value": v, "stage": s}
                             for (a, b), v, s in self.method_trace],
            "lower": self.lower,
            "upper": self.upper,
            "error": self.error,
            "argmax_location": self.argmax_location,
        }


# ----------------------------------------------------------------------
# candidates
# ----------------------------------------------------------------------

def candidate_points(dom, budget: OptimizerBudget = OptimizerBudget()) -> np.ndarray:
    """Complement samples: boundary, bounded holes and, for bounded domains,
    two rings in the unbounded complement component."""
    pts = list(complement_samples(dom, budget.n_boundary, budget.n_interior))
    if is_bounded(dom) and budget.n_exterior > 0:
        B = boundary_sample(dom, budget.n_boundary).as_array()
        c = complex(0.5 * (B.real.min() + B.real.max()), 0.5 * (B.imag.min() + B.imag.max()))
        R = float(np.abs(B - c).max())
        k = budget.n_exterior
        for f in (2.0, 4.0):
            pts += [c + f * R * cmath.exp(2j * math.pi * (j + 0.25) / k) for j in range(k)]
    out = []
    seen = set()
    for z in pts:
        key = (round(z.real, 14), round(z.imag, 14))
        if key not in seen and in_complement(dom, z):
            seen.add(key)
            out.append(complex(z))
    return np.array(out, dtype=complex)


def _key(a: complex, b: complex):
    return (a.real, a.imag, b.real, b.imag)


def _ordered(a: complex, b: complex):
    return (a, b) if (a.real, a.imag) <= (b.real, b.imag) else (b, a)


# ----------------------------------------------------------------------
# optimizer
# ----------------------------------------------------------------------

def pair_supremum(dom, w, objective, budget: OptimizerBudget = OptimizerBudget(), seeds=()) -> PairSupremumResult:
    """Maximise ``objective(a, b)`` (vectorised over arrays) over pairs in the complement.

    Raises
    ------
    PointNotInDomain
        if ``w`` is not in ``dom``.
    InsufficientComplementSamples
        if fewer than two complement points are available.
    """
    w = complex(w)
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    cands = candidate_points(dom, budget)
    if len(cands) < 2:
        raise InsufficientComplementSamples("need at least two complement points")
    i, j = np.triu_indices(len(cands), 1)
    A, B = cands[i], cands[j]
    seed_pairs = []
    for a, b in seeds:
        a, b = project_to_complement(dom, a), project_to_complement(dom, b)
        if abs(a - b) > 1e-9:
            seed_pairs.append(_ordered(a, b))
    if seed_pairs:
        A = np.concatenate([A, [p[0] for p in seed_pairs]])
        B = np.concatenate([B, [p[1] for p in seed_pairs]])
    V = np.asarray(objective(A, B), dtype=float)
    evals = len(V)
    # descending value, ties broken lexicographically on the ordered pair
    pairs = [_ordered(complex(a), complex(b)) for a, b in zip(A, B)]
    order = sorted(range(len(V)), key=lambda k: (-V[k], _key(*pairs[k])))
    starts = []
    for k in order:
        if pairs[k] not in starts:
            starts.append(pairs[k])
        if len(starts) >= budget.coarse_pairs:
            break
    best_pair = starts[0]
    best = float(V[order[0]])
    trace = [(best_pair, best, "coarse")]

    def evaluate(x):
        a = project_to_complement(dom, complex(x[0], x[1]))
        b = project_to_complement(dom, complex(x[2], x[3]))
        if abs(a - b) <= 1e-9 or a == w or b == w:
            return -math.inf, (a, b)
        return float(objective(np.array([a]), np.array([b]))[0]), _ordered(a, b)

    scale = max(1e-3, 0.05 * boundary_distance(dom, w))
    residual = 0.0
    n_starts = min(len(starts), 3)
    for rnd in range(budget.rounds):
        before = best
        seeds_round = [best_pair] if rnd else starts[:n_starts]
        for a0, b0 in seeds_round:
            x0 = np.array([a0.real, a0.imag, b0.real, b0.imag])
            simplex = np.vstack([x0] + [x0 + scale * e for e in np.eye(4)])
            hist = []

            def f(x):
                v, p = evaluate(x)
                hist.append((v, p))
                return -v if math.isfinite(v) else 1e300

            minimize(f, x0, method="Nelder-Mead",
                     options={"maxfev": budget.refine_iters, "xatol": budget.simplex_tolerance,
                              "fatol": 1e-15, "initial_simplex": simplex})
            evals += len(hist)
            for v, p in hist:
                if v > best or (v == best and _key(*p) < _key(*best_pair)):
                    if v > best:
                        trace.append((p, v, f"refine{rnd}"))
                    best, best_pair = v, p
        residual = best - before
        scale *= 0.1
    # the reported value is a fresh evaluation at the argmax pair
    a, b = best_pair
    value = float(objective(np.array([a]), np.array([b]))[0])
    loc = "boundary" if on_boundary(dom, a) and on_boundary(dom, b) else "complement interior"
    return PairSupremumResult(value, (a, b), evals, max(0.0, residual), trace, argmax_location=loc)


# ----------------------------------------------------------------------
# the three suprema
# ----------------------------------------------------------------------

def _kappa_objective(w):
    def obj(A, B):
        d = B - A
        return np.asarray(density_C01((w - A) / d)) / np.abs(d)
    return obj


def _eta_objective(w):
    def obj(A, B):
        d = B - A
        return np.asarray(eta_C01((w - A) / d)) / np.abs(d)
    return obj


def kappa(dom, w, budget: OptimizerBudget = OptimizerBudget()) -> PairSupremumResult:
    """Gardiner-Lakic density ``sup lambda_{C - {a,b}}(w)``."""
    w = complex(w)
    return pair_supremum(dom, w, _kappa_objective(w), budget)


def eta_bar(dom, w, budget: OptimizerBudget = OptimizerBudget(), config=None) -> PairSupremumResult:
    """``sup eta_{C - {a,b}}(w)`` with certified envelopes ``1/(8 delta)`` and ``2/delta``.

    Seeds: the kappa maximiser, the nearest boundary point with the farthest
    boundary sample, and a nearly once-punctured pair (nearest point plus a
    far complement point on the same ray).  ``config`` is accepted for
    interface symmetry; the objective is tabulated.
    """
    w = complex(w)
    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    d = boundary_distance(dom, w)
    p = nearest_boundary_point(dom, w)
    seeds = [kappa(dom, w, budget).argmax_pair]
    B = boundary_sample(dom, budget.n_boundary).as_array()
    far = complex(B[np.argmax(np.abs(B - w))])
    if far != p:
        seeds.append((p, far))
    q = p + (p - w) / abs(p - w) * 1e4 * d
    if in_complement(dom, q):
        seeds.append((p, q))
    res = pair_supremum(dom, w, _eta_objective(w), budget, seeds)
    res.lower = max(1 / (8 * d), res.value)
    res.upper = 2 / d
    res.error = load_table().error
    return res


def delta_bar(dom, w, budget: OptimizerBudget = OptimizerBudget()) -> float:
    """``sup 1/delta_{C - {a,b}}(w)``; equals ``1/delta(w)``."""
    w = complex(w)

    def obj(A, Bp):
        return 1.0 / np.minimum(np.abs(w - A), np.abs(w - Bp))

    if not contains(dom, w):
        raise PointNotInDomain(f"{w} is not in the domain")
    p = nearest_boundary_point(dom, w)
    cands = candidate_points(dom, budget)
    other = complex(cands[np.argmax(np.abs(cands - p))])
    return pair_supremum(dom, w, obj, budget, [(p, other)]).value


# ----------------------------------------------------------------------
# probes
# ----------------------------------------------------------------------

def affine_invariance_check(dom, w, alpha, beta=0, budget: OptimizerBudget = OptimizerBudget()) -> dict:
    """Compare ``eta_bar_{T(dom)}(T w) |alpha|`` with ``eta_bar_dom(w)`` for ``T z = alpha z + beta``."""
    alpha, beta, w = complex(alpha), complex(beta), complex(w)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    lhs = eta_bar(affine_image(dom, alpha, beta), alpha * w + beta, budget)
    rhs = eta_bar(dom, w, budget)
    dev = abs(lhs.value * abs(alpha) / rhs.value - 1)
    return {"alpha": [alpha.real, alpha.imag], "beta": [beta.real, beta.imag], "point": [w.real, w.imag],
            "transformed": lhs.value * abs(alpha), "original": rhs.value, "deviation": dev}


def lsc_probe(dom, w, sequence, budget: OptimizerBudget = OptimizerBudget(), slack: float = 0.02) -> dict:
    """One-sided check ``eta_bar(w) - min(tail eta_bar(w_n)) <= slack * eta_bar(w)``."""
    w = complex(w)
    seq = [complex(z) for z in sequence]
    v0 = eta_bar(dom, w, budget)
    vals = [eta_bar(dom, z, budget).value for z in seq]
    tail = vals[len(vals) // 2:] or [v0.value]
    gap = v0.value - min(tail)
    allowed = slack * v0.value
    return {"point": [w.real, w.imag], "eta_bar": v0.value, "sequence": [[z.real, z.imag] for z in seq],
            "values": vals, "gap": gap, "allowed": allowed, "passed": bool(gap <= allowed)}

"""Quadratic integral functionals over class A and their maximizers.

The functional is J(K) = integral of a h^2 + b h'^2 + c h + d h' with a, b
nonnegative and one of them positive almost everywhere.  Two independent
maximizers are provided:

* ``maximize_over_cone`` discretizes the curvature cone on a grid of n
  angles.  Through the reconstruction kernel, h is linear in the nonnegative
  weight vector w, so J(w) = w'Mw + q'w with M positive semidefinite and the
  feasible set {w >= 0, sum w = 2pi, sum w cos = sum w sin = 0} is a polytope
  whose vertices carry at most three atoms.  A convex quadratic attains its
  maximum at a vertex; multistart single-swap vertex ascent finds it.

* ``maximize_over_triangles`` searches the three-angle triangle family plus
  the needle family directly with multistart Nelder-Mead and a Newton polish.

Vertices are triangles (or antipodal needle pairs), so the two routes agree
when the structural result "maximizers are needles or triangles" holds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from ._kernel import TWO_PI, green_kernel, green_kernel_prime, wrap_2pi, wrap_pi
from ._quadrature import circle_rule, interval_rule, trapezoid_periodic
from .shapes import GridFn, Polygon, Segment, SupportFn
from .support_core import _golden_extremum
from .weingarten import (TriangleSpec, triangle_from_angles, triangle_length_partials,
                         triangle_lengths, triangle_support)


class InvalidCoefficientsError(ValueError):
    """Raised when coefficient data violates the sign requirements."""


# ---------------------------------------------------------------------------
# coefficient functions

class Coefficient:
    def value(self, theta):
        raise NotImplementedError

    def breakpoints(self):
        return np.empty(0)

    def __call__(self, theta):
        return self.value(theta)


@dataclass(frozen=True)
class ConstCoeff(Coefficient):
    c: float

    def value(self, theta):
        return np.full(np.shape(np.asarray(theta)), float(self.c))


@dataclass(frozen=True)
class GridCoeff(Coefficient):
    """Samples on a uniform grid, linearly interpolated."""

    samples: tuple

    def value(self, theta):
        s = np.asarray(self.samples)
        x = wrap_2pi(np.asarray(theta, dtype=float)) / (TWO_PI / s.size)
        i0 = np.floor(x).astype(int) % s.size
        frac = x - np.floor(x)
        return s[i0] * (1 - frac) + s[(i0 + 1) % s.size] * frac


@dataclass(frozen=True)
class BumpCoeff(Coefficient):
    """Piecewise-constant plateau coefficient: `inside` on each bump, `outside` off."""

    bumps: tuple  # of (center, width, inside)
    outside: float

    def __init__(self, bumps, outside):
        cleaned = tuple((float(c), float(w), float(i)) for c, w, i in bumps)
        object.__setattr__(self, "bumps", cleaned)
        object.__setattr__(self, "outside", float(outside))

    def value(self, theta):
        t = np.asarray(theta, dtype=float)
        out = np.full(np.shape(t), self.outside)
        for c, w, inside in self.bumps:
            out = np.where(np.abs(wrap_pi(t - c)) <= w, inside, out)
        return out

    def breakpoints(self):
        edges = []
        for c, w, _ in self.bumps:
            edges.extend([c - w, c + w])
        return np.sort(wrap_2pi(np.asarray(edges)))


@dataclass(frozen=True)
class FuncCoeff(Coefficient):
    """Arbitrary smooth vectorized callable (internal / test use)."""

    fn: object

    def value(self, theta):
        return np.asarray(self.fn(np.asarray(theta, dtype=float)), dtype=float)


def coeff_from_dict(d) -> Coefficient:
    if not isinstance(d, dict):
        raise InvalidCoefficientsError("coefficient spec must be an object")
    if "const" in d:
        return ConstCoeff(float(d["const"]))
    if "grid" in d:
        return GridCoeff(tuple(float(x) for x in d["grid"]))
    if "bumps" in d:
        bumps = [(b["center"], b["width"], b["inside"]) for b in d["bumps"]]
        outs = {float(b["outside"]) for b in d["bumps"]}
        if len(outs) > 1:
            raise InvalidCoefficientsError("bump coefficients must share one outside value")
        return BumpCoeff(bumps, outs.pop() if outs else 0.0)
    raise InvalidCoefficientsError("coefficient spec needs one of const/grid/bumps")


def coeff_to_dict(c: Coefficient):
    if isinstance(c, ConstCoeff):
        return {"const": float(c.c)}
    if isinstance(c, GridCoeff):
        return {"grid": [float(x) for x in c.samples]}
    if isinstance(c, BumpCoeff):
        return {"bumps": [{"center": ctr, "width": w, "inside": i, "outside": c.outside}
                          for ctr, w, i in c.bumps]}
    raise InvalidCoefficientsError("cannot serialize %r" % (type(c).__name__,))


@dataclass(frozen=True)
class QuadCoeffs:
    """The four coefficient functions (a, b, c, d) of the functional J."""

    a: Coefficient
    b: Coefficient
    c: Coefficient
    d: Coefficient

    def validate(self, n=4096):
        t = np.arange(n) * (TWO_PI / n)
        av, bv = self.a.value(t), self.b.value(t)
        if av.min() < -1e-12 or bv.min() < -1e-12:
            raise InvalidCoefficientsError(
                "a and b must be nonnegative: min a = %.3e, min b = %.3e"
                % (av.min(), bv.min()))
        dead = np.mean(av + bv <= 1e-12)
        if dead >= 1e-3:
            raise InvalidCoefficientsError(
                "a + b vanishes on a set of fraction %.2e (needs one of a, b "
                "positive almost everywhere)" % dead)

    def breakpoints(self):
        return np.concatenate([f.breakpoints() for f in (self.a, self.b, self.c, self.d)])

    @staticmethod
    def from_dict(d):
        try:
            return QuadCoeffs(*(coeff_from_dict(d[k]) for k in "abcd"))
        except KeyError as exc:
            raise InvalidCoefficientsError("coefficient JSON lacks field %s" % exc)

    def to_dict(self):
        return {k: coeff_to_dict(getattr(self, k)) for k in "abcd"}


def remark_bump_coeffs(eps=0.05, outside=1e-3) -> QuadCoeffs:
    """The three-bump b coefficient centered on the equilateral normals."""
    centers = [0.0, TWO_PI / 3, 2 * TWO_PI / 3]
    return QuadCoeffs(ConstCoeff(0.0),
                      BumpCoeff([(c, eps, 1.0) for c in centers], outside),
                      ConstCoeff(0.0), ConstCoeff(0.0))


# ---------------------------------------------------------------------------
# evaluation

def eval_J(coeffs: QuadCoeffs, h: SupportFn) -> float:
    """J(h) = integral of a h^2 + b h'^2 + c h + d h'.

    Exact shapes are integrated with kink-split panels (h' has jumps only at
    curvature atoms, which carry no measure); grid shapes use the trapezoid
    rule on their own nodes with central-difference derivatives.
    """
    if isinstance(h, GridFn):
        nodes = h.grid.nodes
        hv = np.asarray(h.samples)
        hp = h.node_derivatives()
        integrand = (coeffs.a.value(nodes) * hv ** 2 + coeffs.b.value(nodes) * hp ** 2
                     + coeffs.c.value(nodes) * hv + coeffs.d.value(nodes) * hp)
        return trapezoid_periodic(integrand)
    bp = np.concatenate([h.breakpoints(), coeffs.breakpoints()])
    nodes, w = circle_rule(bp, max_panel=0.3, order=10)
    hv = h.value(nodes)
    hp = h.derivative(nodes)
    integrand = (coeffs.a.value(nodes) * hv ** 2 + coeffs.b.value(nodes) * hp ** 2
                 + coeffs.c.value(nodes) * hv + coeffs.d.value(nodes) * hp)
    return float(np.dot(w, integrand))


# ---------------------------------------------------------------------------
# discretized curvature cone

@dataclass(frozen=True)
class ConeSystem:
    """J restricted to curvature weights on a grid: J(w) = w'Mw + q'w."""

    nodes: np.ndarray
    M: np.ndarray
    q: np.ndarray

    def value(self, idx, w):
        sub = self.M[np.ix_(idx, idx)]
        return float(w @ sub @ w + self.q[idx] @ w)


def build_cone_system(coeffs: QuadCoeffs, n: int) -> ConeSystem:
    """Assemble M and q by kink-split quadrature (exact for grid-supported atoms)."""
    if n < 64 or n % 2:
        raise ValueError("cone grid size must be even and >= 64")
    nodes = np.arange(n) * (TWO_PI / n)
    qnodes, qw = circle_rule(np.concatenate([nodes, coeffs.breakpoints()]),
                             max_panel=0.2, order=6)
    G = green_kernel(qnodes[:, None] - nodes[None, :])
    Gp = green_kernel_prime(qnodes[:, None] - nodes[None, :])
    av = coeffs.a.value(qnodes) * qw
    bv = coeffs.b.value(qnodes) * qw
    M = G.T @ (G * av[:, None]) + Gp.T @ (Gp * bv[:, None])
    M = 0.5 * (M + M.T)
    qvec = G.T @ (coeffs.c.value(qnodes) * qw) + Gp.T @ (coeffs.d.value(qnodes) * qw)
    rng = np.random.default_rng(0)
    for _ in range(8):
        w = rng.standard_normal(n)
        quad = float(w @ M @ w)
        if quad < -1e-9 * float(w @ w):
            raise InvalidCoefficientsError(
                "quadratic part is not positive semidefinite (w'Mw = %.3e); "
                "coefficient signs are invalid" % quad)
    return ConeSystem(nodes, M, qvec)


_MOMENT_TARGET = np.array([TWO_PI, 0.0, 0.0])


def _batch_weights(nodes, triples):
    """Moment-system weights for each support triple; returns (weights, ok mask)."""
    ang = nodes[triples]
    A = np.stack([np.ones_like(ang), np.cos(ang), np.sin(ang)], axis=1)
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-12
    safe = A.copy()
    safe[~ok] = np.eye(3)
    rhs = np.broadcast_to(_MOMENT_TARGET[:, None], (len(triples), 3, 1)).copy()
    w = np.linalg.solve(safe, rhs)[..., 0]
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(safe)
    ok = ok & (cond <= 1e8)
    return w, ok


def _ascend(system: ConeSystem, start, rng, window, n_random=8, max_moves=500):
    """Single-swap vertex ascent from a feasible support triple."""
    n = system.nodes.size
    idx = np.sort(np.asarray(start, dtype=int))
    w, ok = _batch_weights(system.nodes, idx[None, :])
    if not ok[0]:
        return idx, w[0], -np.inf, 0
    val = system.value(idx, w[0])
    moves = 0
    while moves < max_moves:
        trips = []
        for pos in range(3):
            others = np.delete(idx, pos)
            offs = np.concatenate([np.arange(1, window + 1), -np.arange(1, window + 1)])
            cand = np.concatenate([(idx[pos] + offs) % n, rng.integers(0, n, n_random)])
            cand = np.unique(cand)
            cand = cand[(cand != others[0]) & (cand != others[1])]
            block = np.empty((cand.size, 3), dtype=int)
            block[:, 0] = cand
            block[:, 1:] = others
            trips.append(block)
        trips = np.concatenate(trips)
        ws, ok = _batch_weights(system.nodes, trips)
        feas = ok & (ws.min(axis=1) >= -1e-12)
        if not np.any(feas):
            break
        sub = system.M[trips[:, :, None], trips[:, None, :]]
        vals = np.einsum("bi,bij,bj->b", ws, sub, ws) + np.einsum("bi,bi->b", system.q[trips], ws)
        vals[~feas] = -np.inf
        b = int(np.argmax(vals))
        if vals[b] <= val + 1e-12:
            break
        idx = np.sort(trips[b])
        w0, _ = _batch_weights(system.nodes, idx[None, :])
        w = w0
        val = float(vals[b])
        moves += 1
    return idx, np.maximum(w[0] if w.ndim == 2 else w, 0.0), val, moves


def _random_start(n, rng):
    for _ in range(100):
        idx = rng.choice(n, size=3, replace=False)
        w, ok = _batch_weights(np.arange(n) * (TWO_PI / n), idx[None, :])
        if ok[0] and w[0].min() >= 0:
            return idx
    i = int(rng.integers(0, n))
    return np.array([i, (i + n // 2) % n, (i + n // 4) % n])


def _merge_atoms(angles, weights, tol):
    """Merge atoms closer than tol (circularly), mass-weighted."""
    order = np.argsort(angles)
    ang = list(angles[order])
    wts = list(weights[order])
    changed = True
    while changed and len(ang) > 1:
        changed = False
        for i in range(len(ang)):
            j = (i + 1) % len(ang)
            if i == j:
                break
            gap = abs(wrap_pi(ang[j] - ang[i]))
            if gap <= tol:
                total = wts[i] + wts[j]
                merged = wrap_2pi(ang[i] + wrap_pi(ang[j] - ang[i]) * wts[j] / total)
                hi, lo = max(i, j), min(i, j)
                for k in (hi, lo):
                    del ang[k], wts[k]
                ang.append(float(merged))
                wts.append(float(total))
                order = np.argsort(ang)
                ang = list(np.asarray(ang)[order])
                wts = list(np.asarray(wts)[order])
                changed = True
                break
    return np.asarray(ang), np.asarray(wts)


@dataclass(frozen=True)
class ConeSolution:
    atoms: tuple
    value: float
    classification: str
    h_opt: SupportFn
    iterations: int
    raw_atoms: tuple = ()

    def to_dict(self):
        return {"atoms": [[float(a), float(w)] for a, w in self.atoms],
                "value": float(self.value), "classification": self.classification,
                "iterations": int(self.iterations),
                "raw_atoms": [[float(a), float(w)] for a, w in self.raw_atoms]}


def maximize_over_cone(coeffs: QuadCoeffs, n: int = 256, restarts: int = 10,
                       seed: int = 0) -> ConeSolution:
    """Maximize J over the discretized curvature cone.

    Multistart vertex ascent on the weight polytope; the winning vertex is
    post-processed by dropping zero weights, merging atoms within two grid
    steps (mass-weighted) and re-solving the moment system on the merged
    angles so the output is an exact class-A measure.  Classification:
    ``segment`` for an antipodal pair of weight pi, ``triangle`` for three
    atoms with all gaps inside (0, pi), ``other`` (with a warning) otherwise.
    """
    coeffs.validate()
    system = build_cone_system(coeffs, n)
    rng = np.random.default_rng(seed)
    window = max(1, n // 8)
    best = None
    total_moves = 0
    for _ in range(restarts):
        start = _random_start(n, rng)
        idx, w, val, moves = _ascend(system, start, rng, window)
        total_moves += moves
        key_angles = tuple(system.nodes[idx])
        if best is None or val > best[0] + 1e-12 or \
                (abs(val - best[0]) <= 1e-12 and key_angles < best[3]):
            best = (val, idx, w, key_angles)
    val, idx, w, _ = best
    keep = w > 1e-9
    raw = tuple(zip(system.nodes[idx][keep], w[keep]))
    ang, wts = _merge_atoms(system.nodes[idx][keep], w[keep], 2 * TWO_PI / n)

    classification = "other"
    atoms = tuple(zip(ang, wts))
    h_opt = None
    if ang.size == 3:
        w3, ok = _batch_weights(ang, np.array([[0, 1, 2]]))
        gaps = np.diff(np.concatenate([np.sort(ang), [np.sort(ang)[0] + TWO_PI]]))
        if ok[0] and w3[0].min() > 0 and np.all(gaps < np.pi):
            classification = "triangle"
            order = np.argsort(ang)
            atoms = tuple(zip(np.sort(ang), w3[0][order]))
            h_opt = Polygon(np.sort(ang), w3[0][order])
    elif ang.size == 2:
        gap_err = abs(abs(wrap_pi(ang[1] - ang[0])) - np.pi)
        if gap_err <= TWO_PI / n and np.max(np.abs(wts - np.pi)) <= 1e-6:
            classification = "segment"
            axis = wrap_2pi(ang[0] + wrap_pi((ang[1] - np.pi) - ang[0])
                            * wts[1] / (wts[0] + wts[1]))
            atoms = ((float(axis), np.pi), (float(wrap_2pi(axis + np.pi)), np.pi))
            h_opt = Segment(float(axis))
    if classification == "other":
        warnings.warn("cone vertex did not classify as segment or triangle "
                      "(atoms: %r); discretization artifact" % (atoms,))
        try:
            h_opt = Polygon(system.nodes[idx][keep], w[keep])
        except Exception:
            h_opt = None
    return ConeSolution(atoms, val, classification, h_opt, total_moves, raw)


# ---------------------------------------------------------------------------
# continuous triangle/needle search

@dataclass(frozen=True)
class TriangleSearchResult:
    kind: str                    # "triangle" or "segment" (degenerate triangle)
    value: float
    triangle: TriangleSpec = None
    triangle_value: float = -np.inf
    segment_alpha: float = 0.0
    segment_value: float = -np.inf

    def to_dict(self):
        out = {"kind": self.kind, "value": float(self.value),
               "triangle_value": float(self.triangle_value),
               "segment_alpha": float(self.segment_alpha),
               "segment_value": float(self.segment_value)}
        if self.triangle is not None:
            out["triangle"] = [float(x) for x in self.triangle.angles()]
        return out


def _triangle_value(coeffs, angles):
    return eval_J(coeffs, triangle_support(triangle_from_angles(angles)))


def _fd_gradient(fun, angles, step=1e-5):
    g = np.zeros(3)
    for j in range(3):
        up = np.asarray(angles, dtype=float).copy()
        dn = up.copy()
        up[j] += step
        dn[j] -= step
        g[j] = (fun(up) - fun(dn)) / (2 * step)
    return g


def _margin_of(x):
    g3 = TWO_PI - x[1] - x[2]
    gaps = np.array([x[1], x[2], g3])
    return float(min(gaps.min(), (np.pi - gaps).min()))


def _angles_of(x):
    return np.array([x[0], x[0] + x[1], x[0] + x[1] + x[2]])


def _newton_polish(fun, angles, margin_floor=1e-3, max_iter=30, tol=1e-9):
    """Drive the FD gradient of `fun` to zero (seeking a critical point)."""
    ang = np.asarray(angles, dtype=float).copy()
    for _ in range(max_iter):
        grad = _fd_gradient(fun, ang)
        if np.max(np.abs(grad)) <= tol:
            break
        H = np.zeros((3, 3))
        hstep = 1e-4
        for j in range(3):
            up = ang.copy()
            dn = ang.copy()
            up[j] += hstep
            dn[j] -= hstep
            H[:, j] = (_fd_gradient(fun, up) - _fd_gradient(fun, dn)) / (2 * hstep)
        H = 0.5 * (H + H.T)
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        base = np.max(np.abs(grad))
        moved = False
        while lam > 1e-4:
            cand = ang + lam * step
            tri_gaps = np.array([cand[1] - cand[0], cand[2] - cand[1],
                                 TWO_PI + cand[0] - cand[2]])
            if np.all(tri_gaps > margin_floor) and np.all(np.pi - tri_gaps > margin_floor):
                if np.max(np.abs(_fd_gradient(fun, cand))) < base:
                    ang = cand
                    moved = True
                    break
            lam *= 0.5
        if not moved:
            break
    return ang


def _sobol_starts(count, seed):
    sampler = qmc.Sobol(d=3, scramble=True, seed=seed)
    pts = sampler.random_base2(int(np.ceil(np.log2(max(8, 4 * count)))))
    starts = []
    for p in pts:
        t1 = TWO_PI * p[0]
        g1 = 0.05 + (np.pi - 0.1) * p[1]
        g2 = 0.05 + (np.pi - 0.1) * p[2]
        g3 = TWO_PI - g1 - g2
        if 0.05 < g3 < np.pi - 0.05:
            starts.append(np.array([t1, g1, g2]))
        if len(starts) == count:
            break
    rng = np.random.default_rng(seed)
    while len(starts) < count:
        g1, g2 = rng.uniform(0.05, np.pi - 0.05, 2)
        if 0.05 < TWO_PI - g1 - g2 < np.pi - 0.05:
            starts.append(np.array([rng.uniform(0, TWO_PI), g1, g2]))
    return starts


def best_segment(coeffs: QuadCoeffs, scan_n: int = 1024):
    """(alpha, value) of the best needle, scanned over [0, pi) then refined."""
    alphas = np.arange(scan_n) * (np.pi / scan_n)
    vals = np.array([eval_J(coeffs, Segment(a)) for a in alphas])
    i = int(np.argmax(vals))
    step = np.pi / scan_n
    alpha, val = _golden_extremum(lambda a: eval_J(coeffs, Segment(float(a))),
                                  alphas[i] - step, alphas[i] + step,
                                  maximize=True, tol=1e-10)
    return float(np.mod(alpha, np.pi)), float(val)


def maximize_over_triangles(coeffs: QuadCoeffs, restarts: int = 50,
                            seed: int = 0) -> TriangleSearchResult:
    """Direct search of the triangle family plus the needle family.

    Triangles are parameterized by (theta1, gap1, gap2); multistart
    Nelder-Mead with quadratic boundary repulsion below margin 1e-3, then a
    Newton polish at the incumbent.  The needle family is scanned separately
    and whichever family wins is reported (needles as the degenerate case).
    """
    coeffs.validate()

    def penalized(x):
        m = _margin_of(x)
        if m <= 0:
            return 1e6 * (1.0 - m)
        val = _triangle_value(coeffs, _angles_of(x))
        pen = 0.0
        if m < 1e-3:
            pen = 1e4 * (1e-3 - m) ** 2
        return -val + pen

    best_x, best_val = None, -np.inf
    for x0 in _sobol_starts(restarts, seed):
        res = minimize(penalized, x0, method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-13, maxiter=400, maxfev=600,
                                    initial_simplex=None))
        if -res.fun > best_val and _margin_of(res.x) > 0:
            best_val, best_x = -res.fun, res.x
    tri = None
    tri_val = -np.inf
    if best_x is not None and _margin_of(best_x) > 2e-3:
        ang = _newton_polish(lambda a: _triangle_value(coeffs, a), _angles_of(best_x))
        tri = triangle_from_angles(ang)
        tri_val = _triangle_value(coeffs, ang)
        if tri_val < best_val:
            tri = triangle_from_angles(_angles_of(best_x))
            tri_val = best_val
    elif best_x is not None:
        tri = triangle_from_angles(_angles_of(best_x))
        tri_val = best_val
    seg_alpha, seg_val = best_segment(coeffs)
    if tri is not None and tri_val > seg_val:
        return TriangleSearchResult("triangle", tri_val, tri, tri_val, seg_alpha, seg_val)
    return TriangleSearchResult("segment", seg_val, tri, tri_val, seg_alpha, seg_val)


# ---------------------------------------------------------------------------
# criticality algebra for the squared-L2-distance functional

@dataclass(frozen=True)
class CriticalityReport:
    """Arc integrals and stationarity residuals of J(T) = d2(T, C)^2 at a triangle.

    ``stationarity`` holds the three residuals whose vanishing characterizes a
    critical triangle (half the angle gradient); ``consistency`` holds the six
    residuals of the identities linking the arc integrals to the scalar
    I = integral (h_T - h_C) h_T, which vanish at critical points.
    """

    lengths: np.ndarray
    length_partials: np.ndarray
    arc_integrals: dict
    scalar_i: float
    stationarity: np.ndarray
    consistency: np.ndarray
    fd_gradient: np.ndarray
    distance_sq: float

    def to_dict(self):
        return {"lengths": [float(x) for x in self.lengths],
                "length_partials": [[float(x) for x in row] for row in self.length_partials],
                "arc_integrals": {k: float(v) for k, v in self.arc_integrals.items()},
                "scalar_i": float(self.scalar_i),
                "stationarity": [float(x) for x in self.stationarity],
                "consistency": [float(x) for x in self.consistency],
                "fd_gradient": [float(x) for x in self.fd_gradient],
                "distance_sq": float(self.distance_sq)}


def _arc_integral(diff_fn, lo, hi, c_breaks, weight_fn):
    inner = []
    for b in c_breaks:
        for cand in (b, b + TWO_PI):
            if lo + 1e-12 < cand < hi - 1e-12:
                inner.append(cand)
    nodes, w = interval_rule(lo, hi, inner, max_panel=0.3, order=10)
    return float(np.dot(w, diff_fn(nodes) * weight_fn(nodes)))


def triangle_criticality(tri: TriangleSpec, C: SupportFn) -> CriticalityReport:
    """Stationarity and consistency residuals of d2(., C)^2 at the triangle.

    Both the analytic residuals (built from the arc integrals and the closed
    form side-length partials) and a finite-difference gradient (step 1e-5)
    are returned so each can validate the other.
    """
    t1, t2, t3 = tri.angles()
    hT = triangle_support(tri)
    a = triangle_lengths(tri)
    dA = triangle_length_partials(tri)
    cb = C.breakpoints()

    def diff(nodes):
        return hT.value(nodes) - C.value(nodes)

    arcs = ((t1, t2), (t2, t3), (t3, t1 + TWO_PI))
    I1 = _arc_integral(diff, *arcs[0], cb, lambda x: np.sin(x - t1))
    I2 = _arc_integral(diff, *arcs[0], cb, lambda x: np.sin(x - t2))
    J1 = _arc_integral(diff, *arcs[1], cb, lambda x: np.sin(x - t2))
    J2 = _arc_integral(diff, *arcs[1], cb, lambda x: np.sin(x - t3))
    K1 = _arc_integral(diff, *arcs[2], cb, lambda x: np.sin(x - t3))
    K2 = _arc_integral(diff, *arcs[2], cb, lambda x: np.sin(x - t1))
    C1 = _arc_integral(diff, *arcs[0], cb, lambda x: np.cos(x - t1))
    C3 = _arc_integral(diff, *arcs[1], cb, lambda x: np.cos(x - t3))

    nodes, w = circle_rule(np.concatenate([hT.breakpoints(), cb]), max_panel=0.3, order=10)
    dvals = diff(nodes)
    scalar_i = float(np.dot(w, dvals * hT.value(nodes)))
    dist_sq = float(np.dot(w, dvals * dvals))

    r = np.array([
        dA[0, 0] * I1 - a[0] * C1 - dA[2, 0] * J2,
        dA[0, 1] * I1 - dA[2, 1] * J2,
        dA[0, 2] * I1 + a[2] * C3 - dA[2, 2] * J2,
    ])

    s2 = np.sin(0.5 * tri.gaps()) ** 2
    consistency = np.array([
        scalar_i - np.pi * I1 / s2[0],
        scalar_i + np.pi * J2 / s2[1],
        scalar_i - np.pi * J1 / s2[1],
        scalar_i + np.pi * I2 / s2[0],
        scalar_i - np.pi * K1 / s2[2],
        scalar_i + np.pi * K2 / s2[2],
    ])

    def dist_for(angles):
        shp = triangle_support(triangle_from_angles(angles))
        nn, ww = circle_rule(np.concatenate([shp.breakpoints(), cb]), max_panel=0.3, order=10)
        dd = shp.value(nn) - C.value(nn)
        return float(np.dot(ww, dd * dd))

    fd = _fd_gradient(dist_for, tri.angles(), step=1e-5)

    return CriticalityReport(a, dA,
                             {"I1": I1, "I2": I2, "J1": J1, "J2": J2, "K1": K1, "K2": K2,
                              "C1": C1, "C3": C3},
                             scalar_i, r, consistency, fd, dist_sq)


def critical_triangle(C: SupportFn, start: TriangleSpec, tol: float = 1e-10,
                      max_iter: int = 60) -> TriangleSpec:
    """Damped Newton root-finding on the stationarity residuals of d2(., C)^2."""
    ang = start.angles().astype(float)

    def residuals(angles):
        return triangle_criticality(triangle_from_angles(angles), C).stationarity

    r = residuals(ang)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            break
        J = np.zeros((3, 3))
        step = 1e-6
        for j in range(3):
            up = ang.copy()
            dn = ang.copy()
            up[j] += step
            dn[j] -= step
            J[:, j] = (residuals(up) - residuals(dn)) / (2 * step)
        try:
            delta = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        lam, moved = 1.0, False
        while lam > 1e-6:
            cand = ang + lam * delta
            gaps = np.array([cand[1] - cand[0], cand[2] - cand[1], TWO_PI + cand[0] - cand[2]])
            if np.all(gaps > 1e-3) and np.all(np.pi - gaps > 1e-3):
                rc = residuals(cand)
                if np.max(np.abs(rc)) < np.max(np.abs(r)):
                    ang, r, moved = cand, rc, True
                    break
            lam *= 0.5
        if not moved:
            break
    return triangle_from_angles(ang)


def closure_identities(tri: TriangleSpec) -> dict:
    """Closure sums and the product form of the law-of-sines denominator."""
    a = triangle_lengths(tri)
    t = tri.angles()
    g = tri.gaps()
    direct = np.sin(t[2] - t[1]) + np.sin(t[1] - t[0]) + np.sin(t[0] - t[2])
    product = 4.0 * np.sin(0.5 * g[0]) * np.sin(0.5 * g[1]) * np.sin(0.5 * g[2])
    return {"cos_sum": float(np.dot(a, np.cos(t))),
            "sin_sum": float(np.dot(a, np.sin(t))),
            "denominator_residual": float(direct - product)}

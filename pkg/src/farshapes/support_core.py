"""Geometric functionals on support functions and the two distances.

Everything here works on the class-A normalization: Steiner point at the
origin and perimeter 2pi.  ``normalize_to_class_A`` maps any nondegenerate
convex body into that class; the remaining operations assume (but do not
enforce) it where the docstrings say so.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._kernel import TWO_PI, wrap_2pi, wrap_pi
from ._quadrature import circle_rule, trapezoid_periodic
from .shapes import (AngleGrid, ConvexityError, CurvatureMeasure, FourierForm, GridFn,
                     InvalidShapeError, Polygon, Segment, SupportFn)

DEFAULT_N = 720
DISTANCE_N = 2048

# discrete convexity tolerances; the grid bound scales like 1/spacing because a
# curvature atom of weight w shows up in D^2 h as a spike of height ~ w/spacing
CONVEXITY_TOL_EXACT = 1e-8


def convexity_tol_grid(n):
    return 1e-6 / (TWO_PI / n)


def evaluate(h: SupportFn, theta):
    """Support value h(theta); exact for closed forms, linear-interp for grids."""
    return h.value(theta)


def perimeter(h: SupportFn) -> float:
    """Integral of h over one period (the Cauchy perimeter formula)."""
    if isinstance(h, Segment):
        return TWO_PI
    if isinstance(h, Polygon):
        return float(np.sum(h.lengths))
    if isinstance(h, FourierForm):
        return TWO_PI * h.c0
    if isinstance(h, GridFn):
        return trapezoid_periodic(h.samples)
    nodes, w = circle_rule(h.breakpoints())
    return float(np.dot(w, h.value(nodes)))


def steiner(h: SupportFn):
    """Steiner point (1/pi) * (integral h cos, integral h sin)."""
    if isinstance(h, Segment):
        return np.zeros(2)
    if isinstance(h, Polygon):
        ang = np.asarray(h.normals)
        w = np.asarray(h.lengths)
        # integral of kernel(t) cos t over a period is 1/4
        return np.array([np.dot(w, np.cos(ang)), np.dot(w, np.sin(ang))]) / (4 * np.pi)
    if isinstance(h, FourierForm):
        a1, b1 = h.coefficient(1)
        return np.array([a1, b1])
    if isinstance(h, GridFn):
        nodes = h.grid.nodes
        hh = np.asarray(h.samples)
        return np.array([trapezoid_periodic(hh * np.cos(nodes)),
                         trapezoid_periodic(hh * np.sin(nodes))]) / np.pi
    nodes, w = circle_rule(h.breakpoints())
    vals = h.value(nodes)
    return np.array([np.dot(w, vals * np.cos(nodes)),
                     np.dot(w, vals * np.sin(nodes))]) / np.pi


def normalize_to_class_A(h: SupportFn) -> SupportFn:
    """Rescale to perimeter 2pi and translate the Steiner point to the origin.

    The map is h -> (2pi/P) * (h - s.e(theta)); it preserves convexity.
    Degenerate input (perimeter <= 1e-12) is rejected.
    """
    p = perimeter(h)
    if p <= 1e-12:
        raise InvalidShapeError("degenerate shape: perimeter %.3e" % p)
    scale = TWO_PI / p
    if isinstance(h, Segment):
        return h
    if isinstance(h, Polygon):
        if abs(scale - 1.0) < 1e-15:
            return h
        return Polygon(np.asarray(h.normals), scale * np.asarray(h.lengths))
    if isinstance(h, FourierForm):
        terms = [(k, scale * a, scale * b) for k, a, b in h.terms if k != 1]
        return FourierForm(scale * h.c0, terms)
    if isinstance(h, GridFn):
        nodes = h.grid.nodes
        s = steiner(h)
        vals = scale * (np.asarray(h.samples) - s[0] * np.cos(nodes) - s[1] * np.sin(nodes))
        return GridFn(vals, h.grid)
    raise InvalidShapeError("cannot normalize %r" % (type(h).__name__,))


def class_a_residuals(h: SupportFn):
    """(perimeter - 2pi, |steiner|): both vanish on class A."""
    return perimeter(h) - TWO_PI, float(np.hypot(*steiner(h)))


class MinMax(NamedTuple):
    min: float
    max: float
    argmin: float
    argmax: float


def _golden_extremum(f, lo, hi, maximize, tol=1e-12):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    sgn = 1.0 if maximize else -1.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = sgn * f(c), sgn * f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = sgn * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = sgn * f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _refine_extremum(f, lo, hi, maximize):
    """Golden section to ~1e-7, then parabolic polish.

    Golden section alone stalls at |x - x*| ~ sqrt(eps/|f''|) because value
    comparisons sink below roundoff near a quadratic extremum; two rounds of
    three-point parabolic interpolation recover ~1e-10 in the abscissa.
    """
    x, v = _golden_extremum(f, lo, hi, maximize, tol=1e-7)
    sgn = 1.0 if maximize else -1.0
    for delta in (1e-4, 1e-5):
        f0, fp, fm = f(x), f(x + delta), f(x - delta)
        denom = fp - 2.0 * f0 + fm
        if sgn * denom >= 0:
            continue
        step = -0.5 * delta * (fp - fm) / denom
        if abs(step) <= delta:
            cand = x + step
            if sgn * (f(cand) - f0) >= -1e-13 * max(1.0, abs(f0)):
                x = cand
    return x, f(x)


def _pick(candidates, want_max, value_tol=1e-12):
    """Best (value, angle) pair; ties resolved to the smallest angle in [0, 2pi)."""
    best = max(v for v, _ in candidates) if want_max else min(v for v, _ in candidates)
    angles = [wrap_2pi(a) for v, a in candidates if abs(v - best) <= value_tol]
    return best, float(min(angles))


def min_max_h(h: SupportFn, scan_n: int = 4096) -> MinMax:
    """Global extrema of h with their angles.

    Closed-form critical points are used where the encoding provides them;
    otherwise a dense scan plus golden-section refinement to 1e-12 in angle.
    Ties go to the smallest angle in [0, 2pi).
    """
    if isinstance(h, Segment):
        lo = [(0.0, a) for a in (h.alpha, h.alpha + np.pi)]
        hi = [(0.5 * np.pi, a) for a in (h.alpha + 0.5 * np.pi, h.alpha + 1.5 * np.pi)]
        vmin, amin = _pick(lo, want_max=False)
        vmax, amax = _pick(hi, want_max=True)
        return MinMax(vmin, vmax, amin, amax)
    if isinstance(h, Polygon):
        ang = np.asarray(h.normals)
        hvals = h.value(ang)
        lo = list(zip(hvals, ang))
        verts = h.vertices()
        hi = list(zip(np.hypot(verts[:, 0], verts[:, 1]),
                      wrap_2pi(np.arctan2(verts[:, 1], verts[:, 0]))))
        # an arc can also contain the antipode of its vertex direction
        nxt = np.roll(ang, -1).copy()
        nxt[-1] += TWO_PI
        for (lo_a, hi_a), v in zip(zip(ang, nxt), verts):
            anti = wrap_2pi(np.arctan2(v[1], v[0]) + np.pi)
            for cand in (anti, anti + TWO_PI):
                if lo_a < cand < hi_a:
                    lo.append((h.value(cand), cand))
        vmin, amin = _pick(lo, want_max=False)
        vmax, amax = _pick(hi + lo, want_max=True)
        return MinMax(vmin, vmax, amin, amax)
    # smooth or sampled: scan then refine
    if isinstance(h, GridFn):
        nodes = h.grid.nodes
        vals = np.asarray(h.samples)
        lo = list(zip(vals, nodes))
        vmin, amin = _pick(lo, want_max=False, value_tol=1e-12)
        vmax, amax = _pick(lo, want_max=True, value_tol=1e-12)
        return MinMax(vmin, vmax, amin, amax)
    nodes = np.arange(scan_n) * (TWO_PI / scan_n)
    vals = h.value(nodes)
    step = TWO_PI / scan_n
    out = {}
    for want_max in (True, False):
        ranked = np.argsort(vals)
        picks = ranked[-8:] if want_max else ranked[:8]
        cands = []
        for i in picks:
            x, v = _refine_extremum(h.value, nodes[i] - step, nodes[i] + step, want_max)
            cands.append((v, wrap_2pi(x)))
        # grid nodes tying the refined extremum keep the smallest-angle rule exact
        best = max(v for v, _ in cands) if want_max else min(v for v, _ in cands)
        tied = np.abs(vals - best) <= 1e-10
        cands.extend(zip(vals[tied], nodes[tied]))
        out[want_max] = _pick(cands, want_max, value_tol=1e-10)
    return MinMax(out[False][0], out[True][0], out[False][1], out[True][1])


def _candidate_angles(h1, h2, n):
    pts = [np.arange(n) * (TWO_PI / n), h1.breakpoints(), h2.breakpoints()]
    for h in (h1, h2):
        if isinstance(h, GridFn):
            pts.append(h.grid.nodes)
    return np.unique(wrap_2pi(np.concatenate([np.ravel(p) for p in pts])))


def hausdorff_distance(h1: SupportFn, h2: SupportFn, n: int = DISTANCE_N) -> float:
    """Sup-norm distance of support functions (the Hausdorff distance).

    Scans grid nodes together with both shapes' kink angles, then refines the
    top candidates by golden section.  Inputs are normally class-A normalized;
    this is documented, not enforced.
    """
    cand = _candidate_angles(h1, h2, n)
    diff = np.abs(h1.value(cand) - h2.value(cand))
    best = float(diff.max())
    step = TWO_PI / n
    f = lambda t: abs(h1.value(t) - h2.value(t))
    for i in np.argsort(diff)[-5:]:
        _, v = _golden_extremum(f, cand[i] - step, cand[i] + step, maximize=True, tol=1e-13)
        best = max(best, v)
    return 0.0 if best < 1e-12 else best


def _fourier_table(h: FourierForm):
    tab = {0: (h.c0, 0.0)}
    for k, a, b in h.terms:
        tab[k] = (a, b)
    return tab


def l2_distance(h1: SupportFn, h2: SupportFn, n: int = DISTANCE_N) -> float:
    """L2 distance of support functions over one period.

    Fourier pairs use Parseval; grid operands use trapezoid samples at
    max(n1, n2, 2048); all-exact pairs use kink-split Gauss-Legendre panels,
    which keeps the result accurate to ~1e-13 even across kinks.
    """
    if isinstance(h1, FourierForm) and isinstance(h2, FourierForm):
        t1, t2 = _fourier_table(h1), _fourier_table(h2)
        total = 0.0
        for k in set(t1) | set(t2):
            a1, b1 = t1.get(k, (0.0, 0.0))
            a2, b2 = t2.get(k, (0.0, 0.0))
            scale = TWO_PI if k == 0 else np.pi
            total += scale * ((a1 - a2) ** 2 + (b1 - b2) ** 2)
        return float(np.sqrt(total))
    if isinstance(h1, GridFn) or isinstance(h2, GridFn):
        m = max(n, *(h.grid.n for h in (h1, h2) if isinstance(h, GridFn)))
        nodes = np.arange(m) * (TWO_PI / m)
        d = h1.value(nodes) - h2.value(nodes)
        return float(np.sqrt(trapezoid_periodic(d * d)))
    nodes, w = circle_rule(np.concatenate([h1.breakpoints(), h2.breakpoints()]))
    d = h1.value(nodes) - h2.value(nodes)
    return float(np.sqrt(np.dot(w, d * d)))


def integral_h_squared(h: SupportFn) -> float:
    """Integral of h^2 over one period."""
    if isinstance(h, FourierForm):
        return TWO_PI * h.c0 ** 2 + np.pi * sum(a * a + b * b for _, a, b in h.terms)
    if isinstance(h, GridFn):
        vals = np.asarray(h.samples)
        return trapezoid_periodic(vals * vals)
    nodes, w = circle_rule(h.breakpoints())
    vals = h.value(nodes)
    return float(np.dot(w, vals * vals))


def integral_dh_squared(h: SupportFn) -> float:
    """Integral of h'^2 over one period (central differences on grids)."""
    if isinstance(h, GridFn):
        d = h.node_derivatives()
        return trapezoid_periodic(d * d)
    nodes, w = circle_rule(h.breakpoints())
    d = h.derivative(nodes)
    return float(np.dot(w, d * d))


def boundary_points(h: SupportFn, n=DEFAULT_N):
    """Boundary parameterization x(theta) = h e(theta) + h' e'(theta) for plotting.

    Uses the right-hand derivative at kink angles, so polygon nodes map to the
    vertex that starts the following arc; a segment collapses to its two
    endpoints.
    """
    if isinstance(n, AngleGrid):
        thetas = n.nodes
    elif np.ndim(n) == 0:
        thetas = np.arange(int(n)) * (TWO_PI / int(n))
    else:
        thetas = np.asarray(n, dtype=float)
    hv = h.value(thetas)
    if isinstance(h, GridFn):
        hp = h.derivative(thetas)
    else:
        hp = h.derivative(thetas, side=1)
    x = hv * np.cos(thetas) - hp * np.sin(thetas)
    y = hv * np.sin(thetas) + hp * np.cos(thetas)
    return thetas, np.column_stack([x, y])


def convexity_margin(h: SupportFn, n=DEFAULT_N):
    """Smallest discrete curvature sample D^2 h + h (atom angles excluded).

    Exact encodings are checked on the atom-free part of a probe grid; grid
    encodings are checked globally on their own nodes.
    """
    if isinstance(h, GridFn):
        return float(np.min(h.convexity_samples())), convexity_tol_grid(h.grid.n)
    thetas = np.arange(n) * (TWO_PI / n)
    step = TWO_PI / n
    bp = h.breakpoints()
    if bp.size:
        dist = np.abs(wrap_pi(thetas[:, None] - bp[None, :])).min(axis=1)
        thetas = thetas[dist > 1.5 * step]
    d2 = (h.value(thetas + step) - 2 * h.value(thetas) + h.value(thetas - step)) / step ** 2
    return float(np.min(d2 + h.value(thetas))), CONVEXITY_TOL_EXACT


def check_convex(h: SupportFn, n=DEFAULT_N):
    margin, tol = convexity_margin(h, n)
    if margin < -tol:
        raise ConvexityError("discrete convexity violated: min(D^2 h + h) = %.6e" % margin)


def translate(h: SupportFn, v) -> SupportFn:
    """Support function of the translated body: h + v.e(theta)."""
    v = np.asarray(v, dtype=float)
    if isinstance(h, FourierForm):
        a1, b1 = h.coefficient(1)
        terms = [(k, a, b) for k, a, b in h.terms if k != 1]
        terms.append((1, a1 + v[0], b1 + v[1]))
        return FourierForm(h.c0, terms)
    if isinstance(h, GridFn):
        nodes = h.grid.nodes
        return GridFn(np.asarray(h.samples) + v[0] * np.cos(nodes) + v[1] * np.sin(nodes),
                      h.grid)
    grid = AngleGrid(DEFAULT_N)
    return translate(GridFn(h.value(grid.nodes), grid), v)


def minkowski(h1: SupportFn, h2: SupportFn, s: float, t: float) -> SupportFn:
    """Support function of s*K1 + t*K2 (Minkowski combination), s, t >= 0.

    Atom-backed pairs combine exactly through their curvature measures
    (curvature is linear in the Minkowski sum); Fourier pairs combine
    coefficient-wise; anything else falls back to grid sampling.
    """
    if s < 0 or t < 0:
        raise InvalidShapeError("Minkowski coefficients must be nonnegative")
    if isinstance(h1, (Segment, Polygon)) and isinstance(h2, (Segment, Polygon)):
        from . import weingarten
        atoms = {}
        for shape, scale in ((h1, s), (h2, t)):
            for ang, w in shape.atoms():
                key = round(float(ang), 14)
                atoms[key] = atoms.get(key, 0.0) + scale * w
        merged = [(a, w) for a, w in sorted(atoms.items()) if w > 0]
        return weingarten.solve(CurvatureMeasure(atoms=merged))
    if isinstance(h1, FourierForm) and isinstance(h2, FourierForm):
        tab1, tab2 = _fourier_table(h1), _fourier_table(h2)
        terms = []
        for k in sorted((set(tab1) | set(tab2)) - {0}):
            a1, b1 = tab1.get(k, (0.0, 0.0))
            a2, b2 = tab2.get(k, (0.0, 0.0))
            terms.append((k, s * a1 + t * a2, s * b1 + t * b2))
        return FourierForm(s * h1.c0 + t * h2.c0, terms)
    n = DISTANCE_N
    for h in (h1, h2):
        if isinstance(h, GridFn):
            n = max(n, h.grid.n)
    grid = AngleGrid(n)
    return GridFn(s * h1.value(grid.nodes) + t * h2.value(grid.nodes), grid)


def random_class_A(seed=None, style="mixed", k=4, n=DEFAULT_N, rng=None) -> SupportFn:
    """Random class-A body from a random nonnegative curvature measure.

    Styles: ``atoms`` draws k >= 2 point atoms (k = 2 forces a needle, k = 3 a
    triangle), ``smooth`` draws a strictly positive trigonometric density,
    ``mixed`` splits mass between both.  The draw is corrected onto the moment
    constraints (mass 2pi, vanishing first moments); corrections that lose
    nonnegativity are rejected and redrawn, up to 100 attempts.
    """
    from . import weingarten

    if rng is None:
        rng = np.random.default_rng(seed)
    if style == "atoms" and k < 2:
        raise ValueError("atoms style needs k >= 2")
    for _ in range(100):
        if style == "atoms":
            measure = _draw_atoms(rng, k, TWO_PI)
            if measure is None:
                continue
            return weingarten.solve(measure)
        if style == "smooth":
            rho = _draw_density(rng, n, TWO_PI)
            h = weingarten.solve(CurvatureMeasure(density=rho, grid=AngleGrid(n)))
            return normalize_to_class_A(h)
        if style == "mixed":
            atoms = _draw_atoms(rng, int(rng.integers(2, max(3, k) + 1)), np.pi)
            if atoms is None:
                continue
            rho = _draw_density(rng, n, np.pi)
            measure = CurvatureMeasure(atoms=atoms.atoms, density=rho, grid=AngleGrid(n))
            return normalize_to_class_A(weingarten.solve(measure))
        raise ValueError("unknown style %r" % (style,))
    raise RuntimeError("rejected 100 random curvature draws for style %r" % (style,))


def _draw_atoms(rng, k, mass):
    """Atoms with total mass and vanishing first moments, or None to retry."""
    if k == 2:
        a = rng.uniform(0.0, TWO_PI)
        return CurvatureMeasure(atoms=[(a, mass / 2), (a + np.pi, mass / 2)])
    angles = np.sort(rng.uniform(0.0, TWO_PI, size=k))
    if np.min(np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))) < 1e-3:
        return None
    if k == 3:
        gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
        if np.any(gaps >= np.pi - 1e-3):
            return None
    a_mat = np.vstack([np.ones(k), np.cos(angles), np.sin(angles)])
    target = np.array([mass, 0.0, 0.0])
    w0 = rng.gamma(2.0, 1.0, size=k)
    w0 *= mass / w0.sum()
    # project onto the affine moment constraints, then accept only nonnegative results
    corr = a_mat.T @ np.linalg.solve(a_mat @ a_mat.T, a_mat @ w0 - target)
    w = w0 - corr
    if np.min(w) < 1e-9 * mass:
        return None
    return CurvatureMeasure(atoms=list(zip(angles, w)))


def _draw_density(rng, n, mass):
    """Strictly positive density with zero first moments and given total mass."""
    grid = AngleGrid(n)
    nodes = grid.nodes
    rho = np.ones(n)
    budget = 0.85
    for k in range(2, 6):
        amp = rng.uniform(0.0, budget / 4.0)
        phase = rng.uniform(0.0, TWO_PI)
        rho = rho + amp * np.cos(k * nodes + phase)
    rho = np.maximum(rho, 1e-12)
    return rho * (mass / trapezoid_periodic(rho))

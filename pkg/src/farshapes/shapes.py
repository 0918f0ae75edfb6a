"""Planar convex bodies encoded by their support functions.

The support function of a convex set K is
h(theta) = max over x in K of x.(cos theta, sin theta); it determines K
completely.  Four encodings cover everything this toolkit needs:

* ``Segment(alpha)``   -- the perimeter-2pi needle with axis i*e^{i alpha},
  h = (pi/2)|sin(theta - alpha)|;
* ``Polygon``          -- atomic curvature measure (normal angles + side
  lengths), evaluated in closed form through the reconstruction kernel;
* ``FourierForm``      -- truncated trigonometric series;
* ``GridFn``           -- uniform samples with linear interpolation.

All instances are immutable; operations on them are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernel import TWO_PI, green_kernel, green_kernel_prime, wrap_2pi, wrap_pi
from ._quadrature import trapezoid_periodic


class InvalidShapeError(ValueError):
    """Raised when shape data violates a structural requirement."""


class ConvexityError(InvalidShapeError):
    """Raised when samples fail the discrete convexity test D^2 h + h >= 0."""


class InvalidMeasureError(ValueError):
    """Raised when curvature data cannot describe a closed convex curve."""


@dataclass(frozen=True)
class AngleGrid:
    """Uniform angular grid theta_i = 2*pi*i/n, i = 0..n-1."""

    n: int

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise InvalidShapeError("grid size must be even and >= 8; got %r" % (self.n,))

    @property
    def spacing(self):
        return TWO_PI / self.n

    @property
    def nodes(self):
        return np.arange(self.n) * (TWO_PI / self.n)


def _as_theta(theta):
    arr = np.asarray(theta, dtype=float)
    return arr, arr.ndim == 0


def _ret(values, scalar):
    return float(values) if scalar else values


class SupportFn:
    """Common interface: ``value``, ``derivative``, ``breakpoints``."""

    def value(self, theta):
        raise NotImplementedError

    def derivative(self, theta, side=0):
        """d h / d theta; at kink angles `side` picks -1/0(avg)/+1."""
        raise NotImplementedError

    def breakpoints(self):
        """Sorted kink angles in [0, 2pi); empty for smooth shapes."""
        return np.empty(0)

    def __call__(self, theta):
        return self.value(theta)


@dataclass(frozen=True)
class Segment(SupportFn):
    """Needle of perimeter 2pi: the segment [-i(pi/2)e^{i alpha}, i(pi/2)e^{i alpha}]."""

    alpha: float

    def value(self, theta):
        t, scalar = _as_theta(theta)
        return _ret(0.5 * np.pi * np.abs(np.sin(t - self.alpha)), scalar)

    def derivative(self, theta, side=0):
        t, scalar = _as_theta(theta)
        u = t - self.alpha
        out = 0.5 * np.pi * np.cos(u) * np.sign(np.sin(u))
        if side != 0:
            # one-sided slope at the kinks (sin u = 0, |cos u| = 1) is side*pi/2
            at_kink = np.abs(np.sin(u)) < 1e-15
            out = np.where(at_kink, 0.5 * np.pi * side, out)
        return _ret(out, scalar)

    def breakpoints(self):
        return np.sort(wrap_2pi(np.array([self.alpha, self.alpha + np.pi])))

    def atoms(self):
        return ((wrap_2pi(self.alpha), np.pi), (wrap_2pi(self.alpha + np.pi), np.pi))


def atom_reconstruction(angles, weights, theta, side=None):
    """Kernel-translate reconstruction sum_j w_j * kernel(theta - angle_j).

    This is the closed-form solution of h'' + h = sum_j w_j delta_{angle_j}
    with vanishing first harmonics.  With ``side`` set, returns the one-sided
    derivative instead of the value.
    """
    angles = np.asarray(angles, dtype=float)
    weights = np.asarray(weights, dtype=float)
    t, scalar = _as_theta(theta)
    diff = np.atleast_1d(t).ravel()[:, None] - angles[None, :]
    if side is None:
        vals = green_kernel(diff) @ weights
    else:
        vals = green_kernel_prime(diff, side=side) @ weights
    return _ret(vals[0] if scalar else vals.reshape(np.shape(theta)), scalar)


@dataclass(frozen=True)
class Polygon(SupportFn):
    """Convex polygon given by outer-normal angles and side lengths.

    The closure condition sum_j a_j e^{i theta_j} = 0 is required; it makes
    the kernel-translate evaluator exact and puts the Steiner point at the
    origin.
    """

    normals: tuple = field()
    lengths: tuple = field()

    def __init__(self, normals, lengths, closure_tol=1e-8):
        normals = np.asarray(normals, dtype=float)
        lengths = np.asarray(lengths, dtype=float)
        if normals.ndim != 1 or normals.shape != lengths.shape:
            raise InvalidShapeError("normals and lengths must be 1-d and equal length")
        if normals.size < 3:
            raise InvalidShapeError("a polygon needs at least 3 normals; "
                                    "two antipodal atoms make a Segment")
        normals = wrap_2pi(normals)
        order = np.argsort(normals)
        normals = normals[order]
        lengths = lengths[order]
        if np.any(np.diff(normals) <= 0):
            raise InvalidShapeError("normal angles must be distinct")
        if np.any(lengths <= 0):
            raise InvalidShapeError("side lengths must be positive")
        cx = float(np.dot(lengths, np.cos(normals)))
        cy = float(np.dot(lengths, np.sin(normals)))
        if np.hypot(cx, cy) > closure_tol * max(1.0, lengths.sum()):
            raise InvalidShapeError(
                "sides do not close up: sum a_j e^(i theta_j) = (%.3e, %.3e)" % (cx, cy))
        object.__setattr__(self, "normals", tuple(normals))
        object.__setattr__(self, "lengths", tuple(lengths))

    def _arrays(self):
        return np.asarray(self.normals), np.asarray(self.lengths)

    def value(self, theta):
        ang, w = self._arrays()
        return atom_reconstruction(ang, w, theta)

    def derivative(self, theta, side=0):
        ang, w = self._arrays()
        return atom_reconstruction(ang, w, theta, side=side)

    def breakpoints(self):
        return np.asarray(self.normals)

    def atoms(self):
        return tuple(zip(self.normals, self.lengths))

    def vertices(self):
        """Corner points, one per consecutive normal pair (wrapping around)."""
        ang, _ = self._arrays()
        h = self.value(ang)
        nxt = np.roll(ang, -1)
        hn = np.roll(h, -1)
        s = np.sin(nxt - ang)
        x = (h * np.sin(nxt) - hn * np.sin(ang)) / s
        y = (-h * np.cos(nxt) + hn * np.cos(ang)) / s
        return np.column_stack([x, y])


@dataclass(frozen=True)
class FourierForm(SupportFn):
    """h = c0 + sum over (k, ak, bk) of ak cos(k theta) + bk sin(k theta)."""

    c0: float
    terms: tuple = ()

    def __init__(self, c0, terms=()):
        clean = []
        for k, ak, bk in terms:
            k = int(k)
            if k < 1:
                raise InvalidShapeError("harmonic order must be >= 1; got %d" % k)
            clean.append((k, float(ak), float(bk)))
        clean.sort(key=lambda t: t[0])
        ks = [k for k, _, _ in clean]
        if len(set(ks)) != len(ks):
            raise InvalidShapeError("duplicate harmonic order in terms")
        object.__setattr__(self, "c0", float(c0))
        object.__setattr__(self, "terms", tuple(clean))

    def value(self, theta):
        t, scalar = _as_theta(theta)
        out = np.full(np.shape(t), self.c0, dtype=float)
        for k, ak, bk in self.terms:
            out = out + ak * np.cos(k * t) + bk * np.sin(k * t)
        return _ret(out, scalar)

    def derivative(self, theta, side=0):
        t, scalar = _as_theta(theta)
        out = np.zeros(np.shape(t), dtype=float)
        for k, ak, bk in self.terms:
            out = out + k * (-ak * np.sin(k * t) + bk * np.cos(k * t))
        return _ret(out, scalar)

    def coefficient(self, k):
        for kk, ak, bk in self.terms:
            if kk == k:
                return ak, bk
        return 0.0, 0.0


@dataclass(frozen=True)
class GridFn(SupportFn):
    """Support function known through samples on an AngleGrid (linear interpolation)."""

    samples: tuple
    grid: AngleGrid

    def __init__(self, samples, grid=None):
        samples = np.asarray(samples, dtype=float)
        if grid is None:
            grid = AngleGrid(samples.size)
        if samples.size != grid.n:
            raise InvalidShapeError("sample count %d does not match grid size %d"
                                    % (samples.size, grid.n))
        object.__setattr__(self, "samples", tuple(samples))
        object.__setattr__(self, "grid", grid)

    def _arr(self):
        return np.asarray(self.samples)

    def value(self, theta):
        t, scalar = _as_theta(theta)
        h = self._arr()
        x = wrap_2pi(t) / self.grid.spacing
        i0 = np.floor(x).astype(int) % self.grid.n
        frac = x - np.floor(x)
        vals = h[i0] * (1 - frac) + h[(i0 + 1) % self.grid.n] * frac
        return _ret(vals, scalar)

    def derivative(self, theta, side=0):
        # central differences at the nodes, linearly interpolated in between
        h = self._arr()
        d = (np.roll(h, -1) - np.roll(h, 1)) / (2 * self.grid.spacing)
        t, scalar = _as_theta(theta)
        x = wrap_2pi(t) / self.grid.spacing
        i0 = np.floor(x).astype(int) % self.grid.n
        frac = x - np.floor(x)
        vals = d[i0] * (1 - frac) + d[(i0 + 1) % self.grid.n] * frac
        return _ret(vals, scalar)

    def node_derivatives(self):
        h = self._arr()
        return (np.roll(h, -1) - np.roll(h, 1)) / (2 * self.grid.spacing)

    def convexity_samples(self):
        """Discrete curvature D^2 h + h at the nodes."""
        h = self._arr()
        d2 = (np.roll(h, -1) - 2 * h + np.roll(h, 1)) / self.grid.spacing ** 2
        return d2 + h


@dataclass(frozen=True)
class CurvatureMeasure:
    """Nonnegative measure R = h'' + h: point atoms plus an optional density."""

    atoms: tuple = ()
    density: tuple = None
    grid: AngleGrid = None

    def __init__(self, atoms=(), density=None, grid=None):
        atoms = tuple((float(wrap_2pi(a)), float(w)) for a, w in atoms)
        if density is not None:
            density = np.asarray(density, dtype=float)
            if grid is None:
                grid = AngleGrid(density.size)
            if density.size != grid.n:
                raise InvalidMeasureError("density length does not match grid")
            density = tuple(density)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "grid", grid)

    def atom_arrays(self):
        if not self.atoms:
            return np.empty(0), np.empty(0)
        arr = np.asarray(self.atoms, dtype=float)
        return arr[:, 0], arr[:, 1]

    def mass(self):
        _, w = self.atom_arrays()
        total = float(w.sum())
        if self.density is not None:
            total += trapezoid_periodic(self.density)
        return total

    def first_moments(self):
        ang, w = self.atom_arrays()
        mx = float(np.dot(w, np.cos(ang)))
        my = float(np.dot(w, np.sin(ang)))
        if self.density is not None:
            rho = np.asarray(self.density)
            nodes = self.grid.nodes
            mx += trapezoid_periodic(rho * np.cos(nodes))
            my += trapezoid_periodic(rho * np.sin(nodes))
        return mx, my

    def validate(self, moment_tol=1e-9, target_mass=None, mass_tol=1e-9):
        _, w = self.atom_arrays()
        if np.any(w < 0):
            raise InvalidMeasureError("atom weights must be nonnegative")
        if self.density is not None and min(self.density) < 0:
            raise InvalidMeasureError("density must be nonnegative")
        mx, my = self.first_moments()
        if max(abs(mx), abs(my)) > moment_tol:
            raise InvalidMeasureError(
                "first trigonometric moments must vanish; got (%.3e, %.3e)" % (mx, my))
        if target_mass is not None and abs(self.mass() - target_mass) > mass_tol:
            raise InvalidMeasureError("mass %.12g differs from target %.12g"
                                      % (self.mass(), target_mass))

    def support_angles(self, rel_tol=1e-6):
        """Angles carrying more than rel_tol of the total mass."""
        thresh = rel_tol * self.mass()
        out = [a for a, w in self.atoms if w > thresh]
        if self.density is not None:
            rho = np.asarray(self.density)
            node_mass = rho * self.grid.spacing
            out.extend(self.grid.nodes[node_mass > thresh])
        return np.sort(wrap_2pi(np.asarray(out, dtype=float)))


# ---------------------------------------------------------------------------
# JSON encoding (the wire format used by the CLI and by tests)

def shape_to_dict(h):
    if isinstance(h, Segment):
        return {"type": "segment", "alpha": float(h.alpha)}
    if isinstance(h, Polygon):
        return {"type": "polygon", "normals": list(map(float, h.normals)),
                "lengths": list(map(float, h.lengths))}
    if isinstance(h, FourierForm):
        return {"type": "fourier", "c0": float(h.c0),
                "terms": [[int(k), float(a), float(b)] for k, a, b in h.terms]}
    if isinstance(h, GridFn):
        return {"type": "grid", "n": h.grid.n, "samples": list(map(float, h.samples))}
    raise InvalidShapeError("unknown shape %r" % (type(h).__name__,))


def shape_from_dict(d):
    if not isinstance(d, dict) or "type" not in d:
        raise InvalidShapeError("shape JSON must be an object with a 'type' field")
    kind = d["type"]
    try:
        if kind == "segment":
            return Segment(float(d["alpha"]))
        if kind == "polygon":
            return Polygon(d["normals"], d["lengths"])
        if kind == "fourier":
            return FourierForm(float(d["c0"]), [tuple(t) for t in d.get("terms", [])])
        if kind == "grid":
            return GridFn(d["samples"], AngleGrid(int(d["n"])))
    except KeyError as exc:
        raise InvalidShapeError("shape JSON of type %r lacks field %s" % (kind, exc))
    raise InvalidShapeError("unknown shape type %r" % (kind,))

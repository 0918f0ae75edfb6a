"""Reconstruction of support functions from curvature measures.

Solves h'' + h = R for a 2pi-periodic h with vanishing first harmonics via
the explicit convolution kernel, and builds exact shapes (segments, polygons,
triangles) from curvature data.  Point atoms are convolved in closed form;
densities by trapezoid quadrature on their own grid, one kernel evaluation
per node pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import (G4_MIN, KERNEL_SCALE, TWO_PI, g4, green_kernel, green_kernel_prime,
                      wrap_2pi, wrap_pi)
from .shapes import (AngleGrid, CurvatureMeasure, GridFn, InvalidMeasureError,
                     InvalidShapeError, Polygon, Segment, SupportFn, atom_reconstruction)

MOMENT_TOL = 1e-8


def solve(measure: CurvatureMeasure, grid: AngleGrid = None) -> SupportFn:
    """Support function with h'' + h = measure and zero first harmonics.

    Purely atomic measures come back exact: two antipodal atoms of weight pi
    give a ``Segment``, three or more atoms a ``Polygon``.  Any density
    contribution is convolved numerically and returned as a ``GridFn`` on the
    density's grid (or the caller's ``grid``).

    Rejects measures whose first trigonometric moments exceed 1e-8: no closed
    curve has such a curvature.
    """
    mx, my = measure.first_moments()
    if max(abs(mx), abs(my)) > MOMENT_TOL:
        raise InvalidMeasureError(
            "first moments (%.3e, %.3e) do not vanish: no closed curve exists" % (mx, my))
    angles, weights = measure.atom_arrays()
    if np.any(weights < 0):
        raise InvalidMeasureError("atom weights must be nonnegative")
    if measure.density is None:
        keep = weights > 0
        angles, weights = angles[keep], weights[keep]
        if angles.size < 2:
            raise InvalidMeasureError("an atomic measure needs at least two atoms")
        if angles.size == 2:
            if abs(abs(wrap_pi(angles[1] - angles[0])) - np.pi) > 1e-9:
                raise InvalidMeasureError("a two-atom measure must be antipodal")
            if np.max(np.abs(weights - np.pi)) > 1e-9:
                raise InvalidMeasureError(
                    "two-atom measures are segments; only weight pi (perimeter 2pi) "
                    "is representable exactly -- rescale the measure first")
            return Segment(float(angles[0]))
        return Polygon(angles, weights)
    out_grid = grid if grid is not None else measure.grid
    nodes = out_grid.nodes
    rho = np.asarray(measure.density)
    src = measure.grid.nodes
    vals = green_kernel(src[None, :] - nodes[:, None]) @ (rho * measure.grid.spacing)
    if angles.size:
        vals = vals + atom_reconstruction(angles, weights, nodes)
    return GridFn(vals, out_grid)


def curvature_of(h: SupportFn, n: int = 720) -> CurvatureMeasure:
    """Curvature measure R = h'' + h of a shape.

    Exact atoms for segments and polygons; for Fourier and grid encodings a
    density of discrete samples D^2 h + h (on the shape's own grid when it has
    one).  Atom weights are the side lengths; their support classifies the
    shape as polygonal.
    """
    if isinstance(h, Segment):
        return CurvatureMeasure(atoms=h.atoms())
    if isinstance(h, Polygon):
        return CurvatureMeasure(atoms=h.atoms())
    if isinstance(h, GridFn):
        return CurvatureMeasure(density=h.convexity_samples(), grid=h.grid)
    grid = AngleGrid(n)
    step = grid.spacing
    nodes = grid.nodes
    d2 = (h.value(nodes + step) - 2 * h.value(nodes) + h.value(nodes - step)) / step ** 2
    return CurvatureMeasure(density=d2 + h.value(nodes), grid=grid)


@dataclass(frozen=True)
class TriangleSpec:
    """Triangle in class A, determined by its three outer-normal angles.

    Validity demands each cyclic gap to lie strictly inside (0, pi); the side
    lengths then follow from the law of sines at perimeter 2pi.
    """

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        for name, gap in zip(("theta2-theta1", "theta3-theta2", "2pi+theta1-theta3"),
                             self.gaps()):
            if not 0.0 < gap < np.pi:
                raise InvalidShapeError(
                    "invalid triangle: %s = %.6g must lie in (0, pi)" % (name, gap))

    def angles(self):
        return np.array([self.theta1, self.theta2, self.theta3])

    def gaps(self):
        t = self.angles()
        return np.array([t[1] - t[0], t[2] - t[1], TWO_PI + t[0] - t[2]])

    def margin(self):
        g = self.gaps()
        return float(min(g.min(), (np.pi - g).min()))


def triangle_from_angles(angles) -> TriangleSpec:
    """TriangleSpec from any three distinct angles, sorted into [0, 2pi)."""
    a = np.sort(wrap_2pi(np.asarray(angles, dtype=float)))
    return TriangleSpec(a[0], a[1], a[2])


def triangle_lengths(tri: TriangleSpec):
    """Side lengths of the perimeter-2pi triangle (law of sines).

    Uses the product form of the denominator, which stays accurate as the
    triangle degenerates.
    """
    g = tri.gaps()
    s = np.sin(0.5 * g)
    c = np.cos(0.5 * g)
    # a_i = 2pi sin(g_{i+1}) / (4 prod sin(g/2)) = pi cos(g_{i+1}/2) / (s_i s_{i-1})
    return np.array([np.pi * c[1] / (s[0] * s[2]),
                     np.pi * c[2] / (s[1] * s[0]),
                     np.pi * c[0] / (s[2] * s[1])])


def triangle_length_partials(tri: TriangleSpec):
    """3x3 matrix d a_i / d theta_j of the side lengths, in closed form."""
    g = tri.gaps()
    s = np.sin(0.5 * g)
    c = np.cos(0.5 * g)
    da_dg = np.zeros((3, 3))
    for i in range(3):
        ip, im = (i + 1) % 3, (i - 1) % 3
        da_dg[i, ip] = -0.5 * np.pi * s[ip] / (s[i] * s[im])
        da_dg[i, i] = -0.5 * np.pi * c[ip] * c[i] / (s[i] ** 2 * s[im])
        da_dg[i, im] = -0.5 * np.pi * c[ip] * c[im] / (s[i] * s[im] ** 2)
    # gap m = theta_{m+1} - theta_m, so d g_m / d theta_j = [j == m+1] - [j == m]
    out = np.zeros((3, 3))
    for j in range(3):
        out[:, j] = da_dg[:, (j - 1) % 3] - da_dg[:, j]
    return out


def triangle_support(tri: TriangleSpec) -> Polygon:
    """Exact support function of the class-A triangle with the given normals."""
    return Polygon(tri.angles(), triangle_lengths(tri))


def polygon_support(normals, lengths, normalize=False) -> SupportFn:
    """Exact polygon from atomic curvature data (closure enforced to 1e-8).

    Two antipodal atoms of weight pi collapse to a ``Segment``.  With
    ``normalize`` the side lengths are rescaled to perimeter 2pi.
    """
    normals = np.asarray(normals, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    shape = solve(CurvatureMeasure(atoms=list(zip(normals, lengths))))
    if normalize:
        from .support_core import normalize_to_class_A
        shape = normalize_to_class_A(shape)
    return shape

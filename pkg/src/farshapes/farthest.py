"""Farthest-segment solvers and the sharp-inequality battery.

Both solvers search the needle family Sigma_alpha (alpha taken mod pi).  For
the sup distance the answer comes from the maximum of the support function;
for the L2 distance everything reduces to the one-variable profile

    g(alpha) = integral over [0, pi] of h_C(theta + alpha) sin(theta) dtheta,

through the identity d2(C, Sigma_alpha)^2 = pi^3/4 + |h_C|^2 - 2 pi g(alpha).
``farthest_l2`` selects alpha by maximizing this profile, which is the
published selection rule for this problem; note that by the identity above
the profile's *minimizer* is the segment of largest L2 distance, and the
certificate carries the whole sampled profile so either extremum can be
recovered.  See the distance expansion in ``segment_l2_profile``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernel import TWO_PI, wrap_2pi, wrap_pi
from ._quadrature import interval_rule
from .shapes import FourierForm, GridFn, Segment, SupportFn
from .support_core import (DISTANCE_N, _refine_extremum, hausdorff_distance,
                           integral_dh_squared, integral_h_squared, l2_distance,
                           min_max_h)

SIXTEEN_PI_THIRDS = 16.0 * np.pi / 3.0


@dataclass(frozen=True)
class FarthestResult:
    metric: str
    alpha_star: float
    distance: float
    degenerate: bool
    certificate: dict = field(default_factory=dict)

    def to_dict(self):
        cert = {}
        for key, val in self.certificate.items():
            if isinstance(val, np.ndarray):
                cert[key] = [float(x) for x in val]
            else:
                cert[key] = float(val)
        return {"metric": self.metric, "alpha_star": float(self.alpha_star),
                "distance": float(self.distance), "degenerate_flag": bool(self.degenerate),
                "certificate": cert}


def _profile_rule(C: SupportFn, alpha, order=10):
    """Quadrature rule on [0, pi] splitting at the kink preimages of theta+alpha."""
    bp = wrap_2pi(C.breakpoints() - alpha)
    inner = bp[(bp > 1e-12) & (bp < np.pi - 1e-12)]
    return interval_rule(0.0, np.pi, inner, max_panel=0.3, order=order)


def g_profile(C: SupportFn, alpha):
    """Profile integral of h_C(theta + alpha) sin(theta) over theta in [0, pi].

    Scalar alpha gets a kink-exact panel rule; array alpha is evaluated on a
    shared fine rule (exact for smooth C, ~1e-8 for kinked C).
    """
    if np.ndim(alpha) == 0:
        nodes, w = _profile_rule(C, float(alpha))
        return float(np.dot(w, C.value(nodes + alpha) * np.sin(nodes)))
    alphas = np.asarray(alpha, dtype=float)
    nodes, w = interval_rule(0.0, np.pi, np.empty(0), max_panel=np.pi / 256, order=4)
    ws = w * np.sin(nodes)
    vals = C.value(alphas[:, None] + nodes[None, :])
    return vals @ ws


def segment_l2_profile(C: SupportFn, alphas):
    """d2(C, Sigma_alpha) for an array of alphas, via the profile expansion."""
    h2 = integral_h_squared(C)
    g = g_profile(C, np.asarray(alphas, dtype=float))
    return np.sqrt(np.maximum(np.pi ** 3 / 4.0 + h2 - TWO_PI * g, 0.0))


def farthest_hausdorff(C: SupportFn) -> FarthestResult:
    """Farthest needle in the sup distance: orthogonal to the largest radius.

    The optimal segment is Sigma_{theta_Q} where theta_Q maximizes h_C; its
    axis i e^{i theta_Q} is orthogonal to the direction of the farthest
    boundary point Q.  Ties in the maximum (within 1e-6) set the degenerate
    flag and the smallest maximizing angle is reported.
    """
    from .shapes import Polygon

    mm = min_max_h(C)
    theta_q = mm.argmax
    # collect near-maximal angles (scan clusters plus polygon vertex directions)
    scan = np.arange(4096) * (TWO_PI / 4096)
    vals = C.value(scan)
    near = list(scan[vals >= mm.max - 1e-6])
    if isinstance(C, Polygon):
        verts = C.vertices()
        norms = np.hypot(verts[:, 0], verts[:, 1])
        near.extend(wrap_2pi(np.arctan2(verts[:, 1], verts[:, 0]))[norms >= mm.max - 1e-6])
    if isinstance(C, Segment):
        near.extend([wrap_2pi(C.alpha + 0.5 * np.pi), wrap_2pi(C.alpha + 1.5 * np.pi)])
    near = np.sort(np.asarray(near))
    degenerate = False
    if near.size > 1:
        sep = max(8 * TWO_PI / 4096, 1e-3)
        gaps = np.diff(np.concatenate([near, [near[0] + TWO_PI]]))
        n_clusters = int(np.sum(gaps > sep))
        degenerate = n_clusters > 1 or near.size > 4096 // 4
    alpha = float(np.mod(theta_q, np.pi))
    dist = hausdorff_distance(C, Segment(alpha))
    return FarthestResult("hausdorff", alpha, dist, degenerate,
                          {"theta_q": float(theta_q), "max_h": float(mm.max)})


def farthest_l2(C: SupportFn, scan_n: int = 512) -> FarthestResult:
    """Needle selected by maximizing the profile g over alpha in [0, pi).

    The profile is scanned on ``scan_n`` points and the best point refined by
    golden section to 1e-9 in alpha.  A profile range below 1e-8 (constant
    width bodies, discs) sets the degenerate flag.  The reported distance is
    d2(C, Sigma_alpha*) from the expansion formula; the sampled profile is the
    certificate.
    """
    alphas = np.arange(scan_n) * (np.pi / scan_n)
    prof = g_profile(C, alphas)
    degenerate = float(prof.max() - prof.min()) < 1e-8
    i = int(np.argmax(prof))
    step = np.pi / scan_n
    alpha, _ = _refine_extremum(lambda a: g_profile(C, float(a)),
                                alphas[i] - step, alphas[i] + step, maximize=True)
    alpha = float(np.mod(alpha, np.pi))
    if degenerate:
        alpha = 0.0
    h2 = integral_h_squared(C)
    dist = float(np.sqrt(max(np.pi ** 3 / 4.0 + h2 - TWO_PI * g_profile(C, alpha), 0.0)))
    return FarthestResult("l2", alpha, dist, degenerate,
                          {"profile_alphas": alphas, "profile_values": prof})


def farthest_l2_max_distance(C: SupportFn, scan_n: int = 512):
    """(alpha, distance) of the profile *minimizer*: the L2-farthest needle."""
    alphas = np.arange(scan_n) * (np.pi / scan_n)
    prof = g_profile(C, alphas)
    i = int(np.argmin(prof))
    step = np.pi / scan_n
    alpha, _ = _refine_extremum(lambda a: g_profile(C, float(a)),
                                alphas[i] - step, alphas[i] + step, maximize=False)
    alpha = float(np.mod(alpha, np.pi))
    h2 = integral_h_squared(C)
    dist = float(np.sqrt(max(np.pi ** 3 / 4.0 + h2 - TWO_PI * g_profile(C, alpha), 0.0)))
    return alpha, dist


def sharp_inequality_report(C: SupportFn) -> dict:
    """Residuals of the sharp class-A inequalities; all must be <= 0 up to tolerance.

    Keys:
      max_h_minus_half_pi           max h - pi/2                (<= 0, 0 for needles)
      half_pi_minus_min_plus_max    pi/2 - (min h + max h)      (<= 0, 0 for needles)
      energy_minus_16pi_over_3      |h|^2 + |h'|^2 - 16 pi/3    (<= 0)
      deriv_sq_minus_h_sq           |h'|^2 - |h|^2              (<= 0)
      h_sq_bound_residual           |h|^2 - |h'|^2/4 - 2 pi     (<= 0)
    """
    mm = min_max_h(C)
    h2 = integral_h_squared(C)
    dh2 = integral_dh_squared(C)
    return {
        "max_h_minus_half_pi": mm.max - 0.5 * np.pi,
        "half_pi_minus_min_plus_max": 0.5 * np.pi - (mm.min + mm.max),
        "energy_minus_16pi_over_3": h2 + dh2 - SIXTEEN_PI_THIRDS,
        "deriv_sq_minus_h_sq": dh2 - h2,
        "h_sq_bound_residual": h2 - 0.25 * dh2 - TWO_PI,
    }


def rotate(C: SupportFn, phi: float) -> SupportFn:
    """Support function of the body rotated by phi."""
    from .shapes import AngleGrid, Polygon

    if isinstance(C, Segment):
        return Segment(wrap_2pi(C.alpha + phi))
    if isinstance(C, Polygon):
        return Polygon(wrap_2pi(np.asarray(C.normals) + phi), np.asarray(C.lengths))
    if isinstance(C, FourierForm):
        terms = []
        for k, a, b in C.terms:
            c, s = np.cos(k * phi), np.sin(k * phi)
            terms.append((k, a * c - b * s, b * c + a * s))
        return FourierForm(C.c0, terms)
    if isinstance(C, GridFn):
        return GridFn(C.value(C.grid.nodes - phi), C.grid)
    raise TypeError(type(C).__name__)

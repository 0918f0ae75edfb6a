"""Panelized Gauss-Legendre quadrature with kink-aware panel splitting.

Integrands in this package are piecewise analytic with a known, finite set of
kink angles (curvature atoms, coefficient bump edges).  Splitting panels at
those angles and subdividing to a bounded panel length makes fixed-order
Gauss-Legendre effectively exact for the trigonometric integrands that occur
here.
"""

from __future__ import annotations

import numpy as np

from ._kernel import TWO_PI, wrap_2pi

_MERGE_TOL = 1e-12


def _gauss_cache(order, _cache={}):
    if order not in _cache:
        _cache[order] = np.polynomial.legendre.leggauss(order)
    return _cache[order]


def interval_rule(a, b, breakpoints=(), max_panel=0.35, order=10):
    """Nodes and weights integrating over [a, b], split at interior breakpoints."""
    if b <= a:
        raise ValueError("empty interval")
    pts = [a, b]
    for t in np.ravel(np.asarray(breakpoints, dtype=float)):
        if a + _MERGE_TOL < t < b - _MERGE_TOL:
            pts.append(t)
    edges = np.unique(np.asarray(pts, dtype=float))
    lens = np.diff(edges)
    nsub = np.maximum(1, np.ceil(lens / max_panel).astype(int))
    width = np.repeat(lens / nsub, nsub)
    offset = np.arange(nsub.sum()) - np.repeat(np.cumsum(nsub) - nsub, nsub)
    lo = np.repeat(edges[:-1], nsub) + offset * width
    hi = lo + width
    x, w = _gauss_cache(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def circle_rule(breakpoints=(), max_panel=0.35, order=10):
    """Nodes and weights integrating over one full period [0, 2pi)."""
    bp = wrap_2pi(np.ravel(np.asarray(breakpoints, dtype=float)))
    return interval_rule(0.0, TWO_PI, bp, max_panel=max_panel, order=order)


def integrate_circle(f, breakpoints=(), max_panel=0.35, order=10):
    """Integral of a vectorized callable over one period."""
    nodes, weights = circle_rule(breakpoints, max_panel=max_panel, order=order)
    return float(np.dot(weights, f(nodes)))


def trapezoid_periodic(samples):
    """Trapezoid rule for one period of uniform samples (no repeated endpoint)."""
    samples = np.asarray(samples, dtype=float)
    return float(samples.sum() * TWO_PI / samples.size)

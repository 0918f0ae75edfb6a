"""Shared generators and independent oracles for the test suite."""

import numpy as np
import pytest

import farshapes as fs
from farshapes.quad_functional import ConstCoeff, FuncCoeff, QuadCoeffs

TWO_PI = 2.0 * np.pi


def wrap_pi(t):
    return np.mod(np.asarray(t, dtype=float) + np.pi, TWO_PI) - np.pi


def random_triangle(rng, margin=0.1):
    """Uniform-ish valid triangle normals with all gap margins above `margin`."""
    while True:
        g1, g2 = rng.uniform(margin, np.pi - margin, 2)
        g3 = TWO_PI - g1 - g2
        if margin < g3 < np.pi - margin:
            t1 = rng.uniform(0.0, TWO_PI)
            return fs.TriangleSpec(t1, t1 + g1, t1 + g1 + g2)


def piecewise_triangle_oracle(tri, theta):
    """Independent evaluator of the triangle support: first-harmonic part plus
    per-arc sinusoid corrections.  Angles are taken sorted in [0, 2pi)."""
    t = np.sort(np.mod(tri.angles(), TWO_PI))
    sorted_tri = fs.TriangleSpec(t[0], t[1], t[2])
    a = fs.triangle_lengths(sorted_tri)
    th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    phi = sum(a[k] * t[k] * np.sin(th - t[k]) for k in range(3)) / TWO_PI
    out = phi.copy()
    m12 = (th >= t[0]) & (th <= t[1])
    m23 = (th >= t[1]) & (th <= t[2])
    out[m12] += a[0] * np.sin(th[m12] - t[0])
    out[m23] += -a[2] * np.sin(th[m23] - t[2])
    return out


def random_smooth_coeffs(rng):
    """Benign random coefficient set: smooth, low harmonics, valid signs."""
    def bounded(base_lo, base_hi):
        base = rng.uniform(base_lo, base_hi)
        k = int(rng.integers(1, 4))
        amp = rng.uniform(0.0, 0.8) * base
        phase = rng.uniform(0.0, TWO_PI)
        return FuncCoeff(lambda t, b=base, k=k, a=amp, p=phase: b + a * np.cos(k * t + p))

    def signed():
        k = int(rng.integers(1, 4))
        amp = rng.uniform(-0.5, 0.5)
        phase = rng.uniform(0.0, TWO_PI)
        off = rng.uniform(-0.3, 0.3)
        return FuncCoeff(lambda t, o=off, k=k, a=amp, p=phase: o + a * np.cos(k * t + p))

    a = bounded(0.2, 1.0)
    if rng.uniform() < 0.3:
        b = ConstCoeff(0.0)
    else:
        b = bounded(0.1, 0.8)
    return QuadCoeffs(a, b, signed(), signed())


def body_pool(seed, count, styles=("atoms", "smooth", "mixed")):
    """Deterministic pool of random class-A bodies across styles."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        style = styles[i % len(styles)]
        k = int(rng.integers(2, 8))
        out.append(fs.random_class_A(style=style, k=k, rng=rng))
    return out


@pytest.fixture(scope="session")
def small_body_pool():
    return body_pool(7, 24)


def circ_dist_mod_pi(a, b):
    d = np.mod(a - b, np.pi)
    return min(d, np.pi - d)

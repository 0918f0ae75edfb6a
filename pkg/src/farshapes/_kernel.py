"""Convolution kernel for the periodic curvature equation h'' + h = R.

The reconstruction used throughout is

    h(theta) = integral over [-pi, pi] of kernel(t) * R(theta + t) dt

with kernel(t) = 0.5 * (1 - |t|/pi) * sin|t|, extended 2pi-periodically and
evenly.  The overall scale is pinned by the needle test: the measure
pi*(delta_a + delta_{a+pi}) must reconstruct exactly (pi/2)*|sin(theta - a)|.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

# scale applied to (1 - |t|/pi) sin|t|; pinned by the needle reconstruction
KERNEL_SCALE = 0.5


def wrap_2pi(theta):
    """Reduce angles to [0, 2pi)."""
    return np.mod(theta, TWO_PI)


def wrap_pi(t):
    """Reduce angles to [-pi, pi)."""
    return np.mod(np.asarray(t, dtype=float) + np.pi, TWO_PI) - np.pi


def green_kernel(t):
    """Pinned kernel value, 2pi-periodic and even, zero at 0 and +-pi."""
    u = np.abs(wrap_pi(t))
    return KERNEL_SCALE * (1.0 - u / np.pi) * np.sin(u)


def green_kernel_prime(t, side=0):
    """d/dt of the kernel.

    The derivative jumps by 2*KERNEL_SCALE at t = 0 (mod 2pi); `side` selects
    the left (-1), right (+1) or averaged (0) value there.
    """
    u = wrap_pi(t)
    au = np.abs(u)
    mag = KERNEL_SCALE * (-np.sin(au) / np.pi + (1.0 - au / np.pi) * np.cos(au))
    out = np.sign(u) * mag
    at_kink = au < 1e-15
    if np.any(at_kink):
        out = np.where(at_kink, side * KERNEL_SCALE, out)
    return out


def g4(tau):
    """Four-term kernel window kernel(t)+kernel(t-pi/2)+kernel(-t)+kernel(-t-pi/2).

    With the pinned scale its minimum over [0, pi] is 1/2, attained exactly at
    tau = 0, pi/2 and pi.
    """
    tau = np.asarray(tau, dtype=float)
    return (green_kernel(tau) + green_kernel(tau - 0.5 * np.pi)
            + green_kernel(-tau) + green_kernel(-tau - 0.5 * np.pi))


G4_MIN = 0.5  # brute-force scan minimum of g4 over [0, pi], frozen as regression value

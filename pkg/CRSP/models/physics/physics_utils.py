"""Utility functions for the flight model."""

# License: MIT

import numpy as np
import scipy.linalg as sla
from scipy.optimize import bisect


def skew(w):
    """Cross-product matrix, skew(w) @ v == cross(w, v)."""
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def augment(a_mat, b_vec):
    """Affine system dz/dt = A z + B as a homogeneous 7-state system."""
    n = a_mat.shape[0]
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = a_mat
    aug[:n, n] = b_vec
    return aug


def transition(aug, t):
    """State transition matrix expm(aug * t) of the augmented system."""
    return sla.expm(aug * t)


def power_grid(phi, z0, n_steps, block=32):
    """Evaluate phi^k @ z0 for k = 0..n_steps.

    Builds phi^0..phi^(block-1) once, hops between blocks with
    phi^block, then combines both tables in a single einsum.

    Args:
        phi: one-step transition matrix, ndarray shape=(m, m)
        z0: initial state, ndarray shape=(m,)
        n_steps: number of steps, int
        block: block length, int
    Returns:
        ndarray shape=(n_steps + 1, m)
    """
    m = phi.shape[0]
    powers = np.empty((block, m, m))
    powers[0] = np.eye(m)
    for k in range(1, block):
        powers[k] = phi @ powers[k - 1]
    jump = phi @ powers[-1]

    n_blocks = n_steps // block + 1
    anchors = np.empty((n_blocks, m))
    anchors[0] = z0
    for j in range(1, n_blocks):
        anchors[j] = jump @ anchors[j - 1]

    states = np.einsum("kab,jb->jka", powers, anchors).reshape(-1, m)
    return states[: n_steps + 1]


def rk4_step(deriv, y, h):
    """Classical 4th-order Runge-Kutta step."""
    k1 = deriv(y)
    k2 = deriv(y + 0.5 * h * k1)
    k3 = deriv(y + 0.5 * h * k2)
    k4 = deriv(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def first_crossing(values, level, direction):
    """Index k of the first bracket [k, k+1] where `values` crosses `level`.

    direction=-1 looks for values[k] > level >= values[k+1],
    direction=+1 for values[k] < level <= values[k+1].

    Returns:
        int or None
    """
    above = values - level
    if direction < 0:
        hits = np.nonzero((above[:-1] > 0) & (above[1:] <= 0))[0]
    else:
        hits = np.nonzero((above[:-1] < 0) & (above[1:] >= 0))[0]
    if hits.size == 0:
        return None
    return int(hits[0])


def hermite_root(y0, y1, d0, d1, h, xtol=1e-9):
    """Zero of the cubic Hermite interpolant on [0, h].

    The cubic passes through (0, y0) and (h, y1) with slopes d0 and d1.
    It is bisected in the unit variable s = t / h, so `xtol` is a fraction
    of the step. y0 and y1 are expected to bracket zero.

    Returns:
        elapsed time in [0, h]
    """
    if y0 == 0:
        return 0.0
    if y1 == 0:
        return h
    if np.sign(y0) == np.sign(y1):
        return 0.0 if abs(y0) < abs(y1) else h

    m0, m1 = h * d0, h * d1

    def cubic(s):
        s2 = s * s
        s3 = s2 * s
        return (
            (2 * s3 - 3 * s2 + 1) * y0
            + (s3 - 2 * s2 + s) * m0
            + (-2 * s3 + 3 * s2) * y1
            + (s3 - s2) * m1
        )

    return h * bisect(cubic, 0.0, 1.0, xtol=xtol, maxiter=200)

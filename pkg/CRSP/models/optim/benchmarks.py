"""Benchmark functions for checking the optimizer."""

# License: MIT

import numpy as np


def sphere(x):
    """Global minimum 0 at the origin."""
    x = np.asarray(x)
    return float(np.sum(x**2))


def rastrigin(x, a=10.0):
    """Global minimum 0 at the origin, many local minima on the integer grid."""
    x = np.asarray(x)
    return float(a * x.size + np.sum(x**2 - a * np.cos(2 * np.pi * x)))

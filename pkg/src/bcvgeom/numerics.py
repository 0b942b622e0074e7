"""Small shared numerical helpers: RK4 marching and difference stencils."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def rk4_step(rhs: Callable, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_march(rhs: Callable, y0, nodes: Sequence[float], max_step: float) -> np.ndarray:
    """Integrate y' = rhs(t, y) with fixed-step RK4, returning the state at
    every node.  Each internode interval is subdivided so the step never
    exceeds max_step; nodes must be strictly monotone."""
    y = np.asarray(y0, dtype=float).copy()
    out = [y.copy()]
    for a, b in zip(nodes[:-1], nodes[1:]):
        n = max(1, math.ceil(abs(b - a) / max_step))
        dt = (b - a) / n
        for i in range(n):
            y = rk4_step(rhs, y, a + i * dt, dt)
        out.append(y.copy())
    return np.array(out)


def central_diff(f: Callable[[float], float], x: float, h: float):
    """Second-order central first derivative; f may return an array."""
    fp = np.asarray(f(x + h), dtype=float)
    fm = np.asarray(f(x - h), dtype=float)
    return (fp - fm) / (2.0 * h)


def central_diff4(f: Callable[[float], float], x: float, h: float):
    """Fourth-order central first derivative (5-point stencil)."""
    f2p = np.asarray(f(x + 2 * h), dtype=float)
    f1p = np.asarray(f(x + h), dtype=float)
    f1m = np.asarray(f(x - h), dtype=float)
    f2m = np.asarray(f(x - 2 * h), dtype=float)
    return (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h)


def second_diff(f: Callable[[float], float], x: float, h: float):
    return (np.asarray(f(x + h), float) - 2.0 * np.asarray(f(x), float)
            + np.asarray(f(x - h), float)) / (h * h)

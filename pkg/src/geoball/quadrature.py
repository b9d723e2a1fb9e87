"""Deterministic composite-Simpson quadrature with Richardson doubling."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson


class QuadratureError(RuntimeError):
    """Raised when the doubling loop fails to reach the requested tolerance."""


def simpson_uniform(values: np.ndarray, dx: float) -> float:
    """Composite Simpson integral of uniformly sampled values."""
    return float(simpson(values, dx=dx))


def cumulative_integral(values: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral F(r_i) = int_0^{r_i} f, Simpson-based, F(0) = 0."""
    return cumulative_simpson(values, dx=dx, initial=0.0)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    initial_points: int = 65,
    max_doublings: int = 16,
) -> float:
    """Integrate a smooth vectorized function on [a, b].

    Composite Simpson on a uniform grid, doubled until the relative change
    between successive refinements drops below rel_tol.
    """
    if b < a:
        raise ValueError(f"invalid interval [{a}, {b}]")
    if b == a:
        return 0.0
    n = initial_points if initial_points % 2 == 1 else initial_points + 1
    x = np.linspace(a, b, n)
    prev = simpson_uniform(f(x), x[1] - x[0])
    for _ in range(max_doublings):
        n = 2 * n - 1
        x = np.linspace(a, b, n)
        cur = simpson_uniform(f(x), x[1] - x[0])
        if abs(cur - prev) <= rel_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge to rel_tol={rel_tol} on [{a}, {b}]"
    )

"""Deterministic grid quadrature for low-dimensional posteriors.

Serves as an independent cross-check on MCMC output: any expectation under a
1- or 2-dimensional target can be computed to quadrature accuracy, provided
the density is numerically negligible outside the supplied bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .target import TargetDensity


@dataclass(frozen=True)
class GridOracle:
    """Normalized quadrature weights over a rectangular grid of points."""

    points: np.ndarray   # (n_points, dim)
    weights: np.ndarray  # (n_points,), sums to 1

    def expectation(self, g) -> float:
        """E[g(theta)] for vectorized g mapping (n, dim) -> (n,)."""
        vals = np.asarray(g(self.points), dtype=float)
        return float(self.weights @ vals)

    def probability(self, predicate) -> float:
        return self.expectation(lambda pts: predicate(pts).astype(float))

    def mean(self) -> np.ndarray:
        return self.weights @ self.points


def grid_oracle(
    target: TargetDensity,
    bounds: list[tuple[float, float]],
    resolution: int = 2001,
) -> GridOracle:
    """Build a trapezoid-rule quadrature oracle for a <=2-dimensional target."""
    if target.dim > 2:
        raise ValueError("grid_oracle supports dimension <= 2")
    if len(bounds) != target.dim:
        raise ValueError("one (low, high) bound pair required per dimension")

    axes, axis_w = [], []
    for lo, hi in bounds:
        if not hi > lo:
            raise ValueError(f"invalid bounds ({lo}, {hi})")
        pts = np.linspace(lo, hi, resolution)
        w = np.full(resolution, pts[1] - pts[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        axes.append(pts)
        axis_w.append(w)

    if target.dim == 1:
        points = axes[0][:, None]
        weights = axis_w[0]
    else:
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        points = np.column_stack([g0.ravel(), g1.ravel()])
        weights = np.outer(axis_w[0], axis_w[1]).ravel()

    logd = np.empty(points.shape[0])
    chunk = 200_000
    for start in range(0, points.shape[0], chunk):
        logd[start : start + chunk] = target.log_density(points[start : start + chunk])

    finite = np.isfinite(logd)
    if not finite.any():
        raise ValueError("zero total mass on grid: density is -inf everywhere")
    dens = np.zeros_like(logd)
    dens[finite] = np.exp(logd[finite] - logd[finite].max())
    mass = dens * weights
    total = mass.sum()
    if total <= 0.0:
        raise ValueError("zero total mass on grid")
    return GridOracle(points=points, weights=mass / total)

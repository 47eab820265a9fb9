"""Log-posterior targets and constrained/unconstrained reparameterization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Per-coordinate maps from the unconstrained working space back to the
# parameter's natural support. "log" handles positive scales, "atanh" the
# open interval (-1, 1).
VALID_TRANSFORMS = ("identity", "log", "atanh")


@dataclass(frozen=True)
class TargetDensity:
    """A log-density over a constrained parameter space.

    ``log_density`` is vectorized: it maps an (n, dim) array of parameter
    vectors to an (n,) array of log-density values, returning -inf (never
    NaN) outside the support.
    """

    dim: int
    log_density: Callable[[np.ndarray], np.ndarray]
    parameter_names: tuple[str, ...]
    transforms: tuple[str, ...] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.parameter_names) != self.dim:
            raise ValueError("parameter_names length must equal dim")
        transforms = self.transforms or ("identity",) * self.dim
        if len(transforms) != self.dim:
            raise ValueError("transforms length must equal dim")
        for t in transforms:
            if t not in VALID_TRANSFORMS:
                raise ValueError(f"unknown transform {t!r}")
        object.__setattr__(self, "transforms", tuple(transforms))

    def constrain(self, u: np.ndarray) -> np.ndarray:
        """Map unconstrained (n, dim) points to the parameter support."""
        theta = np.array(u, dtype=float, copy=True)
        for j, t in enumerate(self.transforms):
            if t == "log":
                theta[:, j] = np.exp(u[:, j])
            elif t == "atanh":
                theta[:, j] = np.tanh(u[:, j])
        return theta

    def log_jacobian(self, u: np.ndarray) -> np.ndarray:
        """Log |d theta / d u| summed over coordinates, per row."""
        lj = np.zeros(u.shape[0])
        with np.errstate(divide="ignore"):
            for j, t in enumerate(self.transforms):
                if t == "log":
                    lj += u[:, j]
                elif t == "atanh":
                    # d tanh/du = 1 - tanh^2; saturates to -inf at huge |u|
                    lj += np.log1p(-np.tanh(u[:, j]) ** 2)
        return lj

    def log_density_unconstrained(self, u: np.ndarray) -> np.ndarray:
        return self.log_density(self.constrain(u)) + self.log_jacobian(u)

    def in_support(self, theta: np.ndarray) -> np.ndarray:
        """Row mask of points inside the declared support."""
        ok = np.ones(theta.shape[0], dtype=bool)
        for j, t in enumerate(self.transforms):
            if t == "log":
                ok &= theta[:, j] > 0
            elif t == "atanh":
                ok &= (theta[:, j] > -1) & (theta[:, j] < 1)
        return ok

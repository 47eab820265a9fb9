"""Small numerical helpers shared by the model modules."""

from __future__ import annotations

import numpy as np
from scipy.special import log_expit as _log_expit

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def inverse_logit(x):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def logit(p):
    p = np.asarray(p, dtype=float)
    return np.log(p / (1.0 - p))


def log_expit(x):
    return _log_expit(x)


def normal_logpdf(x, mean, sd):
    z = (np.asarray(x, dtype=float) - mean) / sd
    return -0.5 * z * z - np.log(sd) - LOG_SQRT_2PI


def entropy(probs) -> float:
    """Shannon entropy in nats, with 0 * log(0) = 0."""
    p = np.asarray(probs, dtype=float)
    nz = p > 0.0
    return float(-np.sum(p[nz] * np.log(p[nz])))


def argmin_ties_low(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """argmin breaking exact ties toward the lowest index (numpy default)."""
    return np.argmin(values, axis=axis)

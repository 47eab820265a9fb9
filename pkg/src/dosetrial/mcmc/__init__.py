from .target import TargetDensity
from .rwm import SamplerConfig, PosteriorDraws, SamplingError, sample
from .diagnostics import compute_diagnostics
from .grid import GridOracle, grid_oracle

__all__ = [
    "TargetDensity",
    "SamplerConfig",
    "PosteriorDraws",
    "SamplingError",
    "sample",
    "compute_diagnostics",
    "GridOracle",
    "grid_oracle",
]

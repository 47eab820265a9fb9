"""Adaptive random-walk Metropolis sampling.

Chains evolve in lockstep as rows of a (chains, dim) state array, each with
its own proposal scale and covariance adapted during warmup only, so the
post-warmup kernel is a fixed Metropolis kernel per chain. Identical
(seed, config, target) inputs reproduce draws exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .target import TargetDensity
from .diagnostics import compute_diagnostics

_INIT_ATTEMPTS = 50


class SamplingError(RuntimeError):
    """Raised when a posterior cannot be sampled (bad init or invalid model)."""


@dataclass(frozen=True)
class SamplerConfig:
    chains: int = 4
    warmup: int = 1000
    draws_per_chain: int = 1000
    seed: int = 1234
    adapt_target_accept: float = 0.35

    def __post_init__(self):
        if self.chains < 1 or self.warmup < 1 or self.draws_per_chain < 1:
            raise ValueError("chains, warmup and draws_per_chain must be positive")
        if not 0.0 < self.adapt_target_accept < 1.0:
            raise ValueError("adapt_target_accept must be in (0, 1)")


@dataclass(frozen=True)
class PosteriorDraws:
    """Post-warmup draws in constrained space, merged in chain order."""

    draws: np.ndarray               # (chains * draws_per_chain, dim)
    chains: int
    draws_per_chain: int
    seed: int
    parameter_names: tuple[str, ...]
    diagnostics: dict
    acceptance_rates: np.ndarray    # per chain

    @property
    def total_draws(self) -> int:
        return self.chains * self.draws_per_chain

    def by_chain(self) -> np.ndarray:
        """View shaped (chains, draws_per_chain, dim)."""
        return self.draws.reshape(self.chains, self.draws_per_chain, -1)

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.parameter_names.index(name)]


def sample(target: TargetDensity, config: SamplerConfig | None = None) -> PosteriorDraws:
    """Draw from ``target`` with per-chain adaptive random-walk Metropolis.

    Chains start near the posterior mode with a Laplace-approximation
    proposal covariance, then adapt scale and covariance during warmup.
    """
    config = config or SamplerConfig()
    rng = np.random.default_rng(config.seed)
    d = target.dim
    c = config.chains

    start = _initial_points(target, rng, 1, d)[0]
    mode, laplace_chol = _mode_and_curvature(target, start)
    u = mode[None, :] + 0.3 * (laplace_chol @ rng.standard_normal((c, d)).T).T
    logp = target.log_density_unconstrained(u)
    retry = ~np.isfinite(logp)
    if np.any(retry):
        u[retry] = mode
        logp[retry] = target.log_density_unconstrained(mode[None, :])[0]

    # Per-chain proposal state: scalar log step scale plus covariance Cholesky.
    # The covariance is re-estimated over doubling windows during warmup so
    # that the initial transient does not pollute the final proposal shape.
    log_scale = np.full(c, np.log(2.38 / np.sqrt(d)))
    chol = np.broadcast_to(laplace_chol, (c, d, d)).copy()
    windows = _adaptation_windows(config.warmup)
    window_idx = 0
    mean = np.zeros((c, d))
    m2 = np.zeros((c, d, d))
    n_seen = 0
    t_window = 0

    accepted_post = np.zeros(c)
    out = np.empty((c, config.draws_per_chain, d))

    total = config.warmup + config.draws_per_chain
    for t in range(total):
        warming = t < config.warmup
        eps = rng.standard_normal((c, d))
        step = np.einsum("cij,cj->ci", chol, eps) * np.exp(log_scale)[:, None]
        prop = u + step
        logp_prop = target.log_density_unconstrained(prop)
        if np.any(np.isnan(logp_prop)) or np.any(np.isnan(logp)):
            raise SamplingError("log-density returned NaN during sampling")
        if np.any(np.isposinf(logp_prop)):
            raise SamplingError("log-density diverged to +inf (improper model)")
        log_alpha = logp_prop - logp
        accept = np.log(rng.uniform(size=c)) < log_alpha
        u[accept] = prop[accept]
        logp[accept] = logp_prop[accept]

        if warming:
            alpha = np.exp(np.minimum(log_alpha, 0.0))
            alpha[np.isneginf(log_alpha)] = 0.0
            eta = (t_window + 10.0) ** -0.7
            log_scale += eta * (alpha - config.adapt_target_accept)
            t_window += 1
            n_seen += 1
            delta = u - mean
            mean += delta / n_seen
            m2 += np.einsum("ci,cj->cij", delta, u - mean)
            if window_idx < len(windows) and t + 1 == windows[window_idx]:
                # Pool the window samples across chains and blend with the
                # current proposal shape; short windows get little weight.
                if n_seen > 1:
                    grand_mean = mean.mean(axis=0)
                    dev = mean - grand_mean[None, :]
                    total = m2.sum(axis=0) + n_seen * np.einsum("ci,cj->ij", dev, dev)
                    cov_est = total / (c * n_seen - 1)
                    w = (c * n_seen) / (c * n_seen + 5.0 * d)
                    cov_prev = chol[0] @ chol[0].T
                    blended = w * cov_est + (1.0 - w) * cov_prev
                    chol = np.broadcast_to(
                        _proposal_chol(blended[None, :, :], d)[0], (c, d, d)
                    ).copy()
                mean = np.zeros((c, d))
                m2 = np.zeros((c, d, d))
                n_seen = 0
                t_window = 0
                window_idx += 1
        else:
            accepted_post += accept
            out[:, t - config.warmup] = u

    theta = target.constrain(out.reshape(c * config.draws_per_chain, d))
    if not np.all(target.in_support(theta)):
        raise SamplingError("draw outside declared support (transform mismatch)")

    by_chain = theta.reshape(c, config.draws_per_chain, d)
    diag = compute_diagnostics(by_chain, target.parameter_names)
    return PosteriorDraws(
        draws=theta,
        chains=c,
        draws_per_chain=config.draws_per_chain,
        seed=config.seed,
        parameter_names=tuple(target.parameter_names),
        diagnostics=diag,
        acceptance_rates=accepted_post / config.draws_per_chain,
    )


def _mode_and_curvature(target: TargetDensity, start: np.ndarray):
    """Posterior mode and Cholesky of the Laplace covariance, both in the
    unconstrained space. Falls back to the start point and identity shape when
    optimization or curvature estimation fails."""
    from scipy.optimize import minimize

    d = target.dim
    h = 1e-4

    def neg_logp_and_grad(u: np.ndarray):
        pts = np.vstack([u[None, :], u[None, :] + h * np.eye(d), u[None, :] - h * np.eye(d)])
        vals = target.log_density_unconstrained(pts)
        vals = np.where(np.isfinite(vals), vals, -1e12)
        grad = (vals[1 : d + 1] - vals[d + 1 :]) / (2.0 * h)
        return -vals[0], -grad

    try:
        res = minimize(neg_logp_and_grad, start, jac=True, method="L-BFGS-B",
                       options={"maxiter": 300})
        mode = res.x if np.isfinite(res.fun) else start
    except Exception:
        mode = start

    # Central-difference Hessian of log density, evaluated as one batch.
    offsets = []
    for i in range(d):
        for j in range(d):
            e_i, e_j = np.eye(d)[i], np.eye(d)[j]
            offsets.extend([e_i * h + e_j * h, e_i * h - e_j * h,
                            -e_i * h + e_j * h, -e_i * h - e_j * h])
    pts = mode[None, :] + np.array(offsets)
    vals = target.log_density_unconstrained(pts)
    vals = np.where(np.isfinite(vals), vals, -1e12).reshape(d, d, 4)
    hess = (vals[:, :, 0] - vals[:, :, 1] - vals[:, :, 2] + vals[:, :, 3]) / (4.0 * h * h)
    hess = 0.5 * (hess + hess.T)

    try:
        eigval, eigvec = np.linalg.eigh(-hess)
        var = 1.0 / np.clip(eigval, 1e-4, None)
        cov = (eigvec * var[None, :]) @ eigvec.T
        return mode, np.linalg.cholesky(cov + 1e-10 * np.eye(d))
    except np.linalg.LinAlgError:
        return mode, np.eye(d)


def _adaptation_windows(warmup: int) -> list[int]:
    """End iterations of doubling covariance-estimation windows.

    Updates happen only at window ends; the tail of warmup always forms the
    final (largest) window so the frozen proposal reflects the most data.
    """
    bounds = []
    end = 200
    width = 400
    while end < warmup * 3 // 4:
        bounds.append(end)
        end += width
        width *= 2
    bounds.append(warmup)
    return bounds


def _initial_points(target: TargetDensity, rng, chains: int, dim: int) -> np.ndarray:
    """Origin in unconstrained space, then widening random restarts per chain."""
    u = np.zeros((chains, dim))
    logp = target.log_density_unconstrained(u)
    bad = ~np.isfinite(logp)
    attempts = 0
    while np.any(bad):
        if attempts >= _INIT_ATTEMPTS:
            raise SamplingError(
                f"could not find a finite-density start point after "
                f"{_INIT_ATTEMPTS} attempts"
            )
        trial = rng.normal(scale=1.0 + attempts / 10.0, size=(int(bad.sum()), dim))
        lp = target.log_density_unconstrained(trial)
        ok = np.isfinite(lp)
        idx = np.flatnonzero(bad)[ok]
        u[idx] = trial[ok]
        bad = ~np.isfinite(target.log_density_unconstrained(u))
        attempts += 1
    return u


def _proposal_chol(cov: np.ndarray, d: int) -> np.ndarray:
    """Batched Cholesky of regularized covariances, diagonal fallback if singular."""
    cov = cov + 1e-9 * np.eye(d)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        var = np.clip(np.diagonal(cov, axis1=1, axis2=2), 1e-12, None)
        chol = np.zeros_like(cov)
        idx = np.arange(d)
        chol[:, idx, idx] = np.sqrt(var)
        return chol

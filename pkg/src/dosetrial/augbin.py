"""Augmented binary analysis of dichotomized tumour response (two post-baseline
assessments, single arm).

Log tumour-size ratios are modelled with a bivariate normal whose means are
linear in baseline size; non-shrinkage failures at each assessment follow
logit models. Success for a patient means no failure at either assessment and
final log-ratio below a shrinkage threshold (default log 0.7).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.special import betaln, log_ndtr, ndtr
from scipy.stats import beta as beta_dist
from scipy.stats import truncnorm
from sklearn.base import BaseEstimator

from .common import inverse_logit, log_expit, normal_logpdf
from .mcmc import PosteriorDraws, SamplerConfig, TargetDensity, compute_diagnostics, sample

PARAM_NAMES = (
    "alpha", "beta", "gamma", "sigma1", "sigma2", "rho",
    "alpha_d1", "gamma_d1", "alpha_d2", "gamma_d2",
)
DEFAULT_Y2_UPPER = float(np.log(0.7))


@dataclass(frozen=True)
class AugBinDataset:
    """Tumour sizes (baseline, interim, final; cm) and failure indicators."""

    tumour_size: np.ndarray            # (n, 3) positive
    non_shrinkage_failure: np.ndarray  # (n, 2) in {0, 1}

    def __post_init__(self):
        sizes = np.asarray(self.tumour_size, dtype=float)
        fails = np.asarray(self.non_shrinkage_failure, dtype=int)
        if sizes.ndim != 2 or sizes.shape[1] != 3:
            raise ValueError("tumour_size must have columns (z0, z1, z2)")
        if fails.shape != (sizes.shape[0], 2):
            raise ValueError("non_shrinkage_failure must have columns (d1, d2)")
        if np.any(sizes <= 0.0) or not np.all(np.isfinite(sizes)):
            raise ValueError("tumour sizes must be positive and finite")
        if not np.isin(fails, (0, 1)).all():
            raise ValueError("failure indicators must be 0/1")
        object.__setattr__(self, "tumour_size", sizes)
        object.__setattr__(self, "non_shrinkage_failure", fails)

    @property
    def n(self) -> int:
        return self.tumour_size.shape[0]

    @property
    def z0(self) -> np.ndarray:
        return self.tumour_size[:, 0]

    @property
    def z1(self) -> np.ndarray:
        return self.tumour_size[:, 1]

    @property
    def z2(self) -> np.ndarray:
        return self.tumour_size[:, 2]

    @property
    def log_ratios(self) -> np.ndarray:
        """(n, 2) array of (y1, y2) = log(z1/z0), log(z2/z0)."""
        return np.log(self.tumour_size[:, 1:] / self.tumour_size[:, [0]])

    def binary_success(self, y2_upper: float = DEFAULT_Y2_UPPER) -> np.ndarray:
        y2 = self.log_ratios[:, 1]
        d = self.non_shrinkage_failure
        return ((d[:, 0] == 0) & (d[:, 1] == 0) & (y2 < y2_upper)).astype(int)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "AugBinDataset":
        cols = ["z0", "z1", "z2", "d1", "d2"]
        missing = [c for c in cols if c not in frame.columns]
        if missing:
            raise ValueError(f"dataset missing columns {missing}")
        return cls(
            tumour_size=frame[["z0", "z1", "z2"]].to_numpy(dtype=float),
            non_shrinkage_failure=frame[["d1", "d2"]].to_numpy(dtype=int),
        )

    @classmethod
    def from_csv(cls, path) -> "AugBinDataset":
        return cls.from_frame(pd.read_csv(path))

    @classmethod
    def from_json(cls, path) -> "AugBinDataset":
        """Column-oriented {"z0": [...], ...} or record-oriented JSON files."""
        import json

        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        frame = pd.DataFrame(payload)
        return cls.from_frame(frame)

    @classmethod
    def from_file(cls, path) -> "AugBinDataset":
        if str(path).lower().endswith(".json"):
            return cls.from_json(path)
        return cls.from_csv(path)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "z0": self.z0, "z1": self.z1, "z2": self.z2,
                "d1": self.non_shrinkage_failure[:, 0],
                "d2": self.non_shrinkage_failure[:, 1],
            }
        )


class AugBinModel(BaseEstimator):
    """Two-assessment single-arm augmented binary model.

    Normal priors on the location coefficients, half-normal (a normal
    truncated at zero, location retained) on the two scales, and an LKJ
    prior with shape ``omega_lkj_eta`` on the 2x2 correlation.
    """

    def __init__(
        self,
        alpha_mean=0.0, alpha_sd=1.0,
        beta_mean=0.0, beta_sd=1.0,
        gamma_mean=0.0, gamma_sd=1.0,
        sigma_mean=0.0, sigma_sd=1.0,
        omega_lkj_eta=1.0,
        alpha_d1_mean=0.0, alpha_d1_sd=1.0,
        gamma_d1_mean=0.0, gamma_d1_sd=1.0,
        alpha_d2_mean=0.0, alpha_d2_sd=1.0,
        gamma_d2_mean=0.0, gamma_d2_sd=1.0,
    ):
        self.alpha_mean = alpha_mean
        self.alpha_sd = alpha_sd
        self.beta_mean = beta_mean
        self.beta_sd = beta_sd
        self.gamma_mean = gamma_mean
        self.gamma_sd = gamma_sd
        self.sigma_mean = sigma_mean
        self.sigma_sd = sigma_sd
        self.omega_lkj_eta = omega_lkj_eta
        self.alpha_d1_mean = alpha_d1_mean
        self.alpha_d1_sd = alpha_d1_sd
        self.gamma_d1_mean = gamma_d1_mean
        self.gamma_d1_sd = gamma_d1_sd
        self.alpha_d2_mean = alpha_d2_mean
        self.alpha_d2_sd = alpha_d2_sd
        self.gamma_d2_mean = gamma_d2_mean
        self.gamma_d2_sd = gamma_d2_sd

    def _validate(self):
        for name in ("alpha", "beta", "gamma", "sigma", "alpha_d1", "gamma_d1",
                     "alpha_d2", "gamma_d2"):
            if getattr(self, f"{name}_sd") <= 0.0:
                raise ValueError(f"{name}_sd must be positive")
        if self.omega_lkj_eta <= 0.0:
            raise ValueError("omega_lkj_eta must be positive")

    # ---------------------------------------------------------------- priors

    def _log_prior(self, theta: np.ndarray) -> np.ndarray:
        a, b, g, s1, s2, rho, ad1, gd1, ad2, gd2 = theta.T
        lp = (
            normal_logpdf(a, self.alpha_mean, self.alpha_sd)
            + normal_logpdf(b, self.beta_mean, self.beta_sd)
            + normal_logpdf(g, self.gamma_mean, self.gamma_sd)
            + _half_normal_logpdf(s1, self.sigma_mean, self.sigma_sd)
            + _half_normal_logpdf(s2, self.sigma_mean, self.sigma_sd)
            + _lkj_2x2_logpdf(rho, self.omega_lkj_eta)
            + normal_logpdf(ad1, self.alpha_d1_mean, self.alpha_d1_sd)
            + normal_logpdf(gd1, self.gamma_d1_mean, self.gamma_d1_sd)
            + normal_logpdf(ad2, self.alpha_d2_mean, self.alpha_d2_sd)
            + normal_logpdf(gd2, self.gamma_d2_mean, self.gamma_d2_sd)
        )
        return lp

    def log_posterior(self, dataset: AugBinDataset) -> TargetDensity:
        self._validate()
        y = dataset.log_ratios
        z0, z1 = dataset.z0, dataset.z1
        d1 = dataset.non_shrinkage_failure[:, 0].astype(float)
        d2 = dataset.non_shrinkage_failure[:, 1].astype(float)
        stage2 = d1 == 0.0  # the second failure model conditions on no first failure

        def log_density(theta: np.ndarray) -> np.ndarray:
            a, b, g, s1, s2, rho, ad1, gd1, ad2, gd2 = theta.T
            lp = self._log_prior(theta)

            # |rho| can saturate to 1 in float under the atanh transform;
            # those points are outside the support, not NaNs.
            om = 1.0 - rho**2
            bad = (om <= 0.0) | (s1 <= 0.0) | (s2 <= 0.0)
            om = np.where(bad, 1.0, om)
            s1 = np.where(bad, 1.0, s1)
            s2 = np.where(bad, 1.0, s2)

            mu1 = a[:, None] + g[:, None] * z0[None, :]
            mu2 = b[:, None] + g[:, None] * z0[None, :]
            zz1 = (y[None, :, 0] - mu1) / s1[:, None]
            zz2 = (y[None, :, 1] - mu2) / s2[:, None]
            quad = zz1**2 - 2.0 * rho[:, None] * zz1 * zz2 + zz2**2
            lp = lp + np.sum(
                -np.log(2.0 * np.pi)
                - np.log(s1[:, None] * s2[:, None])
                - 0.5 * np.log(om)[:, None]
                - quad / (2.0 * om[:, None]),
                axis=1,
            )
            lp = np.where(bad, -np.inf, lp)

            eta1 = ad1[:, None] + gd1[:, None] * z0[None, :]
            lp = lp + np.sum(
                np.where(d1[None, :] == 1.0, log_expit(eta1), log_expit(-eta1)), axis=1
            )
            if stage2.any():
                eta2 = ad2[:, None] + gd2[:, None] * z1[None, stage2]
                lp = lp + np.sum(
                    np.where(d2[None, stage2] == 1.0, log_expit(eta2), log_expit(-eta2)),
                    axis=1,
                )
            return lp

        return TargetDensity(
            dim=10,
            log_density=log_density,
            parameter_names=PARAM_NAMES,
            transforms=(
                "identity", "identity", "identity", "log", "log", "atanh",
                "identity", "identity", "identity", "identity",
            ),
        )

    # ------------------------------------------------------------------- fit

    def fit(self, dataset, non_shrinkage_failure=None,
            sampler: SamplerConfig | None = None) -> "AugBinModel":
        """Fit to an AugBinDataset, or to (tumour_size, non_shrinkage_failure)."""
        if not isinstance(dataset, AugBinDataset):
            dataset = AugBinDataset(np.asarray(dataset), np.asarray(non_shrinkage_failure))
        config = sampler or SamplerConfig(warmup=2500, draws_per_chain=1000)
        raw = sample(self._centered_target(dataset), config)
        theta = self._uncenter(raw.draws, dataset)
        by_chain = theta.reshape(config.chains, config.draws_per_chain, len(PARAM_NAMES))
        self.data_ = dataset
        self.draws_ = PosteriorDraws(
            draws=theta,
            chains=raw.chains,
            draws_per_chain=raw.draws_per_chain,
            seed=raw.seed,
            parameter_names=PARAM_NAMES,
            diagnostics=compute_diagnostics(by_chain, PARAM_NAMES),
            acceptance_rates=raw.acceptance_rates,
        )
        return self

    def _centering(self, dataset: AugBinDataset) -> tuple[float, float]:
        """Covariate centers for the internal reparameterization."""
        stage2 = dataset.non_shrinkage_failure[:, 0] == 0
        c0 = float(dataset.z0.mean())
        c1 = float(dataset.z1[stage2].mean()) if stage2.any() else 0.0
        return c0, c1

    def _centered_target(self, dataset: AugBinDataset) -> TargetDensity:
        """Sampling target with intercepts shifted to the covariate centers.

        The raw posterior carries near-unit intercept/slope correlations
        (tumour sizes are far from zero); sampling the sheared coordinates
        (alpha + gamma c0, ..., alpha_d2 + gamma_d2 c1) removes them. The
        shear is unit-Jacobian, so the density is just composed with the
        inverse map.
        """
        base = self.log_posterior(dataset)
        c0, c1 = self._centering(dataset)

        def log_density(theta_c: np.ndarray) -> np.ndarray:
            return base.log_density(self._uncenter(theta_c, dataset, (c0, c1)))

        return TargetDensity(
            dim=10,
            log_density=log_density,
            parameter_names=PARAM_NAMES,
            transforms=base.transforms,
        )

    def _uncenter(self, theta_c: np.ndarray, dataset: AugBinDataset,
                  centers: tuple[float, float] | None = None) -> np.ndarray:
        c0, c1 = centers if centers is not None else self._centering(dataset)
        theta = np.array(theta_c, copy=True)
        theta[:, 0] -= theta_c[:, 2] * c0   # alpha
        theta[:, 1] -= theta_c[:, 2] * c0   # beta
        theta[:, 6] -= theta_c[:, 7] * c0   # alpha_d1
        theta[:, 8] -= theta_c[:, 9] * c1   # alpha_d2
        return theta

    # --------------------------------------------------------------- predict

    def predict(
        self,
        newdata: pd.DataFrame | None = None,
        y2_upper: float = DEFAULT_Y2_UPPER,
        y1_lower: float | None = None,
        y1_upper: float | None = None,
        probs: tuple[float, float] = (0.025, 0.975),
    ) -> pd.DataFrame:
        """Per-patient success probabilities given baseline and interim sizes.

        Conditions on the observed interim log-ratio through the conditional
        normal for the final assessment. ``newdata`` needs columns z0 and z1;
        by default the fitted patients are scored.
        """
        if not 0.0 < probs[0] < probs[1] < 1.0:
            raise ValueError("quantile probs must be increasing within (0, 1)")
        if newdata is None:
            newdata = pd.DataFrame({"id": np.arange(1, self.data_.n + 1),
                                    "z0": self.data_.z0, "z1": self.data_.z1})
        z0 = newdata["z0"].to_numpy(dtype=float)
        z1 = newdata["z1"].to_numpy(dtype=float)
        if np.any(z0 <= 0.0) or np.any(z1 <= 0.0):
            raise ValueError("tumour sizes must be positive")

        q = self.success_prob_conditional(z0, z1, y2_upper=y2_upper,
                                          y1_lower=y1_lower, y1_upper=y1_upper)
        lower = np.quantile(q, probs[0], axis=0)
        upper = np.quantile(q, probs[1], axis=0)
        return pd.DataFrame(
            {
                "id": newdata["id"] if "id" in newdata else np.arange(1, len(z0) + 1),
                "z0": z0,
                "z1": z1,
                "prob_success": q.mean(axis=0),
                "lower": lower,
                "upper": upper,
                "ci_width": upper - lower,
            }
        )

    def success_prob_conditional(
        self, z0, z1,
        y2_upper: float = DEFAULT_Y2_UPPER,
        y1_lower: float | None = None,
        y1_upper: float | None = None,
    ) -> np.ndarray:
        """Per-draw success probabilities, shape (draws, patients)."""
        z0 = np.atleast_1d(np.asarray(z0, dtype=float))
        z1 = np.atleast_1d(np.asarray(z1, dtype=float))
        th = self.draws_.draws
        a, b, g, s1, s2, rho, ad1, gd1, ad2, gd2 = (th[:, [j]] for j in range(10))
        y1 = np.log(z1 / z0)[None, :]

        mu1 = a + g * z0[None, :]
        mu2 = b + g * z0[None, :]
        mu_cond = mu2 + rho * s2 / s1 * (y1 - mu1)
        sd_cond = s2 * np.sqrt(1.0 - rho**2)
        q = (
            (1.0 - inverse_logit(ad1 + gd1 * z0[None, :]))
            * (1.0 - inverse_logit(ad2 + gd2 * z1[None, :]))
            * ndtr((y2_upper - mu_cond) / sd_cond)
        )
        ok = np.ones(len(z0), dtype=bool)
        if y1_lower is not None:
            ok &= y1[0] >= y1_lower
        if y1_upper is not None:
            ok &= y1[0] <= y1_upper
        return q * ok[None, :]

    def success_prob_marginal(
        self, z0: float, y2_upper: float = DEFAULT_Y2_UPPER,
        mc_samples: int = 1000, seed: int = 0,
    ) -> np.ndarray:
        """Per-draw Monte Carlo evaluation of the unconditional success integral."""
        if mc_samples < 1000:
            raise ValueError("mc_samples must be at least 1000")
        if z0 <= 0.0:
            raise ValueError("z0 must be positive")
        rng = np.random.default_rng(seed)
        th = self.draws_.draws
        a, b, g, s1, s2, rho, ad1, gd1, ad2, gd2 = (th[:, [j]] for j in range(10))

        eps = rng.standard_normal((th.shape[0], mc_samples, 2))
        y1 = a + g * z0 + s1 * eps[:, :, 0]
        y2 = (
            b + g * z0
            + s2 * (rho * eps[:, :, 0] + np.sqrt(1.0 - rho**2) * eps[:, :, 1])
        )
        z1 = z0 * np.exp(y1)
        q = (
            (1.0 - inverse_logit(ad1 + gd1 * z0))
            * (1.0 - inverse_logit(ad2 + gd2 * z1))
            * (y2 < y2_upper)
        )
        return q.mean(axis=1)


def _half_normal_logpdf(x: np.ndarray, mean: float, sd: float) -> np.ndarray:
    out = np.full(x.shape, -np.inf)
    pos = x > 0.0
    out[pos] = normal_logpdf(x[pos], mean, sd) - log_ndtr(mean / sd)
    return out


def _lkj_2x2_logpdf(rho: np.ndarray, eta: float) -> np.ndarray:
    out = np.full(rho.shape, -np.inf)
    ok = np.abs(rho) < 1.0
    const = -(2.0 * eta - 1.0) * np.log(2.0) - betaln(eta, eta)
    out[ok] = (eta - 1.0) * np.log1p(-rho[ok] ** 2) + const
    return out


def binary_prob_success(
    fit_or_dataset,
    y2_upper: float = DEFAULT_Y2_UPPER,
    method: str = "exact",
    conf_level: float = 0.95,
) -> dict:
    """Dichotomized analysis: exact (Clopper-Pearson) interval for the success rate."""
    if method != "exact":
        raise ValueError("only the exact (Clopper-Pearson) method is supported")
    dataset = fit_or_dataset.data_ if isinstance(fit_or_dataset, AugBinModel) else fit_or_dataset
    n = dataset.n
    if n == 0:
        raise ValueError("dataset has no patients")
    x = int(dataset.binary_success(y2_upper).sum())
    alpha = 1.0 - conf_level
    lower = float(beta_dist.ppf(alpha / 2.0, x, n - x + 1)) if x > 0 else 0.0
    upper = float(beta_dist.ppf(1.0 - alpha / 2.0, x + 1, n - x)) if x < n else 1.0
    return {
        "method": "exact",
        "x": x,
        "n": n,
        "mean": x / n,
        "lower": lower,
        "upper": upper,
        "ci_width": upper - lower,
    }


def prior_predictive_2t_1a(
    priors: AugBinModel | dict,
    num_samps: int,
    z0_range: tuple[float, float] = (5.0, 10.0),
    seed: int = 0,
) -> pd.DataFrame:
    """Sample datasets from the prior: tumour trajectories and failure events.

    Returns one row per sampled patient with columns
    (id, z0, y0, y1, y2, prob_d1, prob_d2, d1, d2).
    """
    model = priors if isinstance(priors, AugBinModel) else AugBinModel(**priors)
    model._validate()
    if num_samps < 1:
        raise ValueError("num_samps must be >= 1")
    rng = np.random.default_rng(seed)

    a = rng.normal(model.alpha_mean, model.alpha_sd, num_samps)
    b = rng.normal(model.beta_mean, model.beta_sd, num_samps)
    g = rng.normal(model.gamma_mean, model.gamma_sd, num_samps)
    s1 = _sample_half_normal(rng, model.sigma_mean, model.sigma_sd, num_samps)
    s2 = _sample_half_normal(rng, model.sigma_mean, model.sigma_sd, num_samps)
    rho = 2.0 * rng.beta(model.omega_lkj_eta, model.omega_lkj_eta, num_samps) - 1.0
    ad1 = rng.normal(model.alpha_d1_mean, model.alpha_d1_sd, num_samps)
    gd1 = rng.normal(model.gamma_d1_mean, model.gamma_d1_sd, num_samps)
    ad2 = rng.normal(model.alpha_d2_mean, model.alpha_d2_sd, num_samps)
    gd2 = rng.normal(model.gamma_d2_mean, model.gamma_d2_sd, num_samps)

    z0 = rng.uniform(z0_range[0], z0_range[1], num_samps)
    eps = rng.standard_normal((num_samps, 2))
    y1 = a + g * z0 + s1 * eps[:, 0]
    y2 = b + g * z0 + s2 * (rho * eps[:, 0] + np.sqrt(1.0 - rho**2) * eps[:, 1])
    z1 = z0 * np.exp(y1)
    prob_d1 = inverse_logit(ad1 + gd1 * z0)
    prob_d2 = inverse_logit(ad2 + gd2 * z1)
    d1 = rng.binomial(1, prob_d1)
    d2 = rng.binomial(1, prob_d2)

    return pd.DataFrame(
        {
            "id": np.arange(1, num_samps + 1),
            "z0": z0,
            "y0": np.zeros(num_samps),
            "y1": y1,
            "y2": y2,
            "prob_d1": prob_d1,
            "prob_d2": prob_d2,
            "d1": d1,
            "d2": d2,
        }
    )


def _sample_half_normal(rng, mean: float, sd: float, size: int) -> np.ndarray:
    a = (0.0 - mean) / sd
    return truncnorm.rvs(a, np.inf, loc=mean, scale=sd, size=size, random_state=rng)


def simulate_scenario(
    n: int,
    delta1: float = -0.356,
    sigma: float = 1.0,
    alpha_d: float = -1.5,
    gamma_d: float = 0.0,
    seed: int = 0,
) -> AugBinDataset:
    """Generate a dataset from the benchmark simulation scenario.

    Log-ratio means are (delta1/2, delta1) with covariance
    [[sigma^2/2, sigma^2/2], [sigma^2/2, sigma^2]]; failure probabilities
    follow logit models in baseline and interim size.
    """
    if n < 1 or sigma <= 0.0:
        raise ValueError("need n >= 1 and sigma > 0")
    rng = np.random.default_rng(seed)
    mu = np.array([0.5 * delta1, delta1])
    cov = np.array([[0.5 * sigma**2, 0.5 * sigma**2], [0.5 * sigma**2, sigma**2]])
    y = rng.multivariate_normal(mu, cov, size=n)
    z0 = rng.uniform(5.0, 10.0, n)
    z1 = z0 * np.exp(y[:, 0])
    z2 = z0 * np.exp(y[:, 1])
    d1 = rng.binomial(1, inverse_logit(alpha_d + gamma_d * z0))
    d2 = rng.binomial(1, inverse_logit(alpha_d + gamma_d * z1))
    return AugBinDataset(
        tumour_size=np.column_stack([z0, z1, z2]),
        non_shrinkage_failure=np.column_stack([d1, d2]),
    )

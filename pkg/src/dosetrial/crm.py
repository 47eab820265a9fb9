"""Continual reassessment method models, including time-to-event weighting.

Four dose-toxicity link variants are supported. Dose-levels are codified into
dose labels so that, at the prior means of the parameters, the modelled
probability of dose-limiting toxicity at label ``d_k`` equals the skeleton
value ``p_k``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln
from sklearn.base import BaseEstimator

from .common import argmin_ties_low, entropy, inverse_logit, log_expit, logit, normal_logpdf
from .mcmc import GridOracle, PosteriorDraws, SamplerConfig, TargetDensity, grid_oracle, sample
from .outcomes import Alphabet, OutcomeSequence, from_vectors, parse_outcomes

CRM_MODELS = ("empiric", "logistic", "logistic_gamma", "logistic2")


class CrmModel(BaseEstimator):
    """Bayesian CRM dose-finding model.

    Parameters
    ----------
    skeleton : prior DLT probabilities (p_1 < ... < p_K), all in (0, 1).
    target : target toxicity rate in (0, 1).
    model : one of "empiric", "logistic", "logistic_gamma", "logistic2".
    a0 : fixed intercept (required by the logistic and logistic_gamma links).
    beta_mean, beta_sd : normal prior on the slope (empiric, logistic, logistic2).
    beta_shape, beta_rate : gamma prior on the slope (logistic_gamma).
    alpha_mean, alpha_sd : normal prior on the intercept (logistic2 only).
    """

    def __init__(
        self,
        skeleton=(0.1, 0.2, 0.3, 0.4, 0.5),
        target=0.25,
        model="empiric",
        a0=None,
        beta_mean=0.0,
        beta_sd=1.0,
        beta_shape=None,
        beta_rate=None,
        alpha_mean=None,
        alpha_sd=None,
    ):
        self.skeleton = skeleton
        self.target = target
        self.model = model
        self.a0 = a0
        self.beta_mean = beta_mean
        self.beta_sd = beta_sd
        self.beta_shape = beta_shape
        self.beta_rate = beta_rate
        self.alpha_mean = alpha_mean
        self.alpha_sd = alpha_sd

    # ------------------------------------------------------------------ spec

    @property
    def num_doses(self) -> int:
        return len(self.skeleton)

    def _validate(self):
        skel = np.asarray(self.skeleton, dtype=float)
        if skel.ndim != 1 or len(skel) < 1:
            raise ValueError("skeleton must be a non-empty vector")
        if not (np.all(skel > 0.0) and np.all(skel < 1.0) and np.all(np.diff(skel) > 0)):
            raise ValueError("skeleton must be strictly increasing within (0, 1)")
        if not 0.0 < self.target < 1.0:
            raise ValueError("target must be in (0, 1)")
        if self.model not in CRM_MODELS:
            raise ValueError(f"model must be one of {CRM_MODELS}")
        if self.model in ("logistic", "logistic_gamma") and self.a0 is None:
            raise ValueError(f"{self.model} model requires a0")
        if self.model == "logistic_gamma":
            if self.beta_shape is None or self.beta_rate is None:
                raise ValueError("logistic_gamma requires beta_shape and beta_rate")
            if self.beta_shape <= 0 or self.beta_rate <= 0:
                raise ValueError("beta_shape and beta_rate must be positive")
        else:
            if self.beta_sd is None or self.beta_sd <= 0:
                raise ValueError("beta_sd must be positive")
        if self.model == "logistic2":
            if self.alpha_mean is None or self.alpha_sd is None:
                raise ValueError("logistic2 requires alpha_mean and alpha_sd")
            if self.alpha_sd <= 0:
                raise ValueError("alpha_sd must be positive")
        # only the hyperparameters the chosen link uses may be supplied
        unused = {
            "empiric": ("a0", "beta_shape", "beta_rate", "alpha_mean", "alpha_sd"),
            "logistic": ("beta_shape", "beta_rate", "alpha_mean", "alpha_sd"),
            "logistic_gamma": ("alpha_mean", "alpha_sd"),
            "logistic2": ("a0", "beta_shape", "beta_rate"),
        }[self.model]
        extras = [name for name in unused if getattr(self, name) is not None]
        if extras:
            raise ValueError(
                f"{self.model} model does not use hyperparameters {extras}"
            )
        return skel

    def codify_doses(self) -> np.ndarray:
        """Dose labels d_k with prior-mean DLT probability equal to the skeleton."""
        skel = self._validate()
        if self.model == "empiric":
            return skel ** np.exp(-self.beta_mean)
        if self.model == "logistic":
            return (logit(skel) - self.a0) / np.exp(self.beta_mean)
        if self.model == "logistic_gamma":
            beta_bar = self.beta_shape / self.beta_rate
            if beta_bar == 0.0:
                raise ValueError("gamma prior mean of zero cannot codify doses")
            return (logit(skel) - self.a0) / beta_bar
        # logistic2
        return (logit(skel) - self.alpha_mean) / np.exp(self.beta_mean)

    def _prob_tox(self, theta: np.ndarray, labels: np.ndarray) -> np.ndarray:
        """F(d_k, theta) for a batch of parameter rows; shape (n, K)."""
        with np.errstate(over="ignore", under="ignore"):
            if self.model == "empiric":
                return np.exp(np.exp(theta[:, 0])[:, None] * np.log(labels)[None, :])
            if self.model == "logistic":
                lin = self.a0 + np.exp(theta[:, 0])[:, None] * labels[None, :]
            elif self.model == "logistic_gamma":
                lin = self.a0 + theta[:, 0][:, None] * labels[None, :]
            else:  # logistic2
                lin = theta[:, 0][:, None] + np.exp(theta[:, 1])[:, None] * labels[None, :]
            return inverse_logit(lin)

    def _log_prior(self, theta: np.ndarray) -> np.ndarray:
        if self.model == "logistic_gamma":
            beta = theta[:, 0]
            lp = np.full(len(beta), -np.inf)
            pos = beta > 0
            lp[pos] = (
                self.beta_shape * np.log(self.beta_rate)
                - gammaln(self.beta_shape)
                + (self.beta_shape - 1.0) * np.log(beta[pos])
                - self.beta_rate * beta[pos]
            )
            return lp
        if self.model == "logistic2":
            return normal_logpdf(theta[:, 0], self.alpha_mean, self.alpha_sd) + normal_logpdf(
                theta[:, 1], self.beta_mean, self.beta_sd
            )
        return normal_logpdf(theta[:, 0], self.beta_mean, self.beta_sd)

    def log_posterior(self, data: OutcomeSequence) -> TargetDensity:
        """Weighted-likelihood log posterior as a sampling target."""
        labels = self.codify_doses()
        self._check_data(data)
        dose_idx = np.array([r.dose_level - 1 for r in data.records], dtype=int)
        y = np.array([r.toxicity for r in data.records], dtype=float)
        w = np.array([r.weight for r in data.records], dtype=float)

        if self.model == "logistic2":
            names, transforms = ("alpha", "beta"), ("identity", "identity")
        elif self.model == "logistic_gamma":
            names, transforms = ("beta",), ("log",)
        else:
            names, transforms = ("beta",), ("identity",)

        def log_density(theta: np.ndarray) -> np.ndarray:
            lp = self._log_prior(theta)
            if len(dose_idx):
                f = self._prob_tox(theta, labels)[:, dose_idx]
                with np.errstate(divide="ignore", invalid="ignore"):
                    tox_terms = np.log(w[None, :] * f)
                    clear_terms = np.log1p(-w[None, :] * f)
                ll = np.where(y[None, :] == 1.0, tox_terms, clear_terms)
                lp = lp + ll.sum(axis=1)
            return np.where(np.isnan(lp), -np.inf, lp)

        return TargetDensity(
            dim=len(names),
            log_density=log_density,
            parameter_names=names,
            transforms=transforms,
        )

    def _check_data(self, data: OutcomeSequence):
        if data.alphabet is not Alphabet.BINARY and len(data):
            raise ValueError("CRM models take binary (T/N) outcome data")
        for rec in data.records:
            if rec.dose_level > self.num_doses:
                raise ValueError(
                    f"dose_level {rec.dose_level} outside the {self.num_doses}-dose grid"
                )
            if rec.weight == 0.0 and rec.toxicity:
                raise ValueError(
                    "a weight-0 toxicity has zero likelihood and is rejected as invalid"
                )

    # ------------------------------------------------------------------- fit

    def fit(self, outcomes="", sampler: SamplerConfig | None = None) -> "CrmModel":
        """Fit to an outcome string or OutcomeSequence (empty for prior-only)."""
        if isinstance(outcomes, str):
            data = parse_outcomes(outcomes, Alphabet.BINARY)
        else:
            data = outcomes
        target_density = self.log_posterior(data)
        draws = sample(target_density, sampler or SamplerConfig())
        self._summarize(data, draws)
        return self

    def fit_tite(self, doses_given, tox, weights, sampler: SamplerConfig | None = None):
        """Fit with per-patient evaluation weights (time-to-event CRM)."""
        return self.fit(from_vectors(doses_given, tox, weights), sampler=sampler)

    def _summarize(self, data: OutcomeSequence, draws: PosteriorDraws):
        labels = self.codify_doses()
        prob_tox = self._prob_tox(draws.draws, labels)
        nominated = argmin_ties_low(np.abs(prob_tox - self.target), axis=1)
        k = self.num_doses
        prob_mtd = np.bincount(nominated, minlength=k) / len(nominated)

        self.data_ = data
        self.dose_labels_ = labels
        self.draws_ = draws
        self.prob_tox_draws_ = prob_tox
        self.prob_tox_ = prob_tox.mean(axis=0)
        self.prob_tox_median_ = np.median(prob_tox, axis=0)
        self.prob_mtd_ = prob_mtd
        self.recommended_dose_ = int(argmin_ties_low(np.abs(self.prob_tox_ - self.target))) + 1
        self.modal_mtd_ = int(np.argmax(prob_mtd)) + 1
        self.entropy_ = entropy(prob_mtd)
        self.num_patients_ = np.bincount(
            [r.dose_level - 1 for r in data.records], minlength=k
        )
        self.num_toxicities_ = np.bincount(
            [r.dose_level - 1 for r in data.records if r.toxicity],
            minlength=k,
        )

    # ------------------------------------------------------------- utilities

    def posterior_oracle(self, outcomes="", resolution: int = 2001) -> GridOracle:
        """Grid-quadrature oracle over the same posterior ``fit`` samples."""
        if isinstance(outcomes, str):
            outcomes = parse_outcomes(outcomes, Alphabet.BINARY)
        density = self.log_posterior(outcomes)
        if self.model == "logistic_gamma":
            mean = self.beta_shape / self.beta_rate
            sd = np.sqrt(self.beta_shape) / self.beta_rate
            bounds = [(1e-9, mean + 15.0 * sd)]
        elif self.model == "logistic2":
            bounds = [
                (self.alpha_mean - 10.0 * self.alpha_sd, self.alpha_mean + 10.0 * self.alpha_sd),
                (self.beta_mean - 10.0 * self.beta_sd, self.beta_mean + 10.0 * self.beta_sd),
            ]
            resolution = min(resolution, 901)
        else:
            bounds = [(self.beta_mean - 12.0 * self.beta_sd, self.beta_mean + 12.0 * self.beta_sd)]
        return grid_oracle(density, bounds, resolution)

    def prob_tox_at(self, theta: np.ndarray) -> np.ndarray:
        """Toxicity curve F(d_k, theta) for explicit parameter rows."""
        return self._prob_tox(np.atleast_2d(theta), self.codify_doses())

    def fit_summary(self) -> dict:
        """Per-dose snapshot of the fitted model (used by pathway nodes)."""
        return {
            "dose_levels": list(range(1, self.num_doses + 1)),
            "prob_tox": [float(v) for v in self.prob_tox_],
            "median_prob_tox": [float(v) for v in self.prob_tox_median_],
            "prob_mtd": [float(v) for v in self.prob_mtd_],
            "recommended_dose": self.recommended_dose_,
            "entropy": float(self.entropy_),
        }

"""Efficacy-toxicity trade-off dose-finding.

Marginal logit models for toxicity and efficacy on standardized (centered
log) doses, joined by an association parameter, with dose attractiveness
scored by an L^p trade-off contour through three elicited hinge points.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .common import argmin_ties_low, entropy, inverse_logit, normal_logpdf
from .mcmc import PosteriorDraws, SamplerConfig, TargetDensity, sample
from .outcomes import Alphabet, OutcomeSequence, parse_outcomes

PARAM_NAMES = ("alpha", "beta", "gamma", "zeta", "eta", "psi")
_CLAMP = 1e-12


def standardize_doses(real_doses) -> np.ndarray:
    """Centered log doses: x_j = log(y_j) - mean(log(y))."""
    y = np.asarray(real_doses, dtype=float)
    if np.any(y <= 0.0):
        raise ValueError("real doses must be positive")
    logs = np.log(y)
    return logs - logs.mean()


def joint_prob(a: int, b: int, pi_e, pi_t, psi):
    """Pr(Y_E = a, Y_T = b) under the association model.

    The association term uses (e^psi - 1)/(e^psi + 1) = tanh(psi / 2); the
    four cell probabilities always sum to one.
    """
    base = pi_e**a * (1.0 - pi_e) ** (1 - a) * pi_t**b * (1.0 - pi_t) ** (1 - b)
    assoc = pi_e * (1.0 - pi_e) * pi_t * (1.0 - pi_t) * np.tanh(psi / 2.0)
    return base + (-1.0) ** (a + b) * assoc


def solve_contour_exponent(eff0: float, tox1: float, eff_star: float, tox_star: float) -> float:
    """Exponent p of the neutral-utility contour through the three hinge points.

    Solves ((1-eff_star)/(1-eff0))^p + (tox_star/tox1)^p = 1 by bisection.
    """
    if not (0.0 < eff0 < eff_star < 1.0 and 0.0 < tox_star < tox1 < 1.0):
        raise ValueError(
            "hinge points must satisfy 0 < eff0 < eff_star < 1 and 0 < tox_star < tox1 < 1"
        )
    r1 = (1.0 - eff_star) / (1.0 - eff0)
    r2 = tox_star / tox1

    def f(p):
        return r1**p + r2**p - 1.0

    lo, hi = 1e-6, 100.0
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0.0:
        raise ValueError("invalid hinge configuration: no contour exponent in bracket")
    while hi - lo > 1e-14 and abs(f(0.5 * (lo + hi))) > 1e-12:
        mid = 0.5 * (lo + hi)
        if f(mid) * flo > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def utility(pi_e, pi_t, eff0: float, tox1: float, p: float):
    """Trade-off utility; 0 on the neutral contour, 1 at (eff, tox) = (1, 0)."""
    with np.errstate(divide="ignore"):
        term = ((1.0 - pi_e) / (1.0 - eff0)) ** p + (np.asarray(pi_t, dtype=float) / tox1) ** p
    return 1.0 - term ** (1.0 / p)


class EffToxModel(BaseEstimator):
    """Bayesian efficacy-toxicity dose-finding model.

    Priors are normal on all six parameters: toxicity intercept/slope
    (alpha, beta), efficacy intercept/slope/curvature (gamma, zeta, eta),
    and the association parameter (psi).
    """

    def __init__(
        self,
        real_doses=(1.0, 2.0, 4.0, 6.6, 10.0),
        efficacy_hurdle=0.5,
        toxicity_hurdle=0.3,
        p_e=0.1,
        p_t=0.1,
        eff0=0.5,
        tox1=0.65,
        eff_star=0.7,
        tox_star=0.25,
        alpha_mean=-7.9593,
        alpha_sd=3.5487,
        beta_mean=1.5482,
        beta_sd=3.5018,
        gamma_mean=0.7367,
        gamma_sd=2.5423,
        zeta_mean=3.4181,
        zeta_sd=2.4406,
        eta_mean=0.0,
        eta_sd=0.2,
        psi_mean=0.0,
        psi_sd=1.0,
    ):
        self.real_doses = real_doses
        self.efficacy_hurdle = efficacy_hurdle
        self.toxicity_hurdle = toxicity_hurdle
        self.p_e = p_e
        self.p_t = p_t
        self.eff0 = eff0
        self.tox1 = tox1
        self.eff_star = eff_star
        self.tox_star = tox_star
        self.alpha_mean = alpha_mean
        self.alpha_sd = alpha_sd
        self.beta_mean = beta_mean
        self.beta_sd = beta_sd
        self.gamma_mean = gamma_mean
        self.gamma_sd = gamma_sd
        self.zeta_mean = zeta_mean
        self.zeta_sd = zeta_sd
        self.eta_mean = eta_mean
        self.eta_sd = eta_sd
        self.psi_mean = psi_mean
        self.psi_sd = psi_sd

    # ------------------------------------------------------------------ spec

    @property
    def num_doses(self) -> int:
        return len(self.real_doses)

    def _validate(self) -> np.ndarray:
        doses = np.asarray(self.real_doses, dtype=float)
        if np.any(doses <= 0.0) or np.any(np.diff(doses) <= 0.0):
            raise ValueError("real_doses must be positive and strictly increasing")
        for name in ("efficacy_hurdle", "toxicity_hurdle", "p_e", "p_t"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1)")
        for name in PARAM_NAMES:
            if getattr(self, f"{name}_sd") <= 0.0:
                raise ValueError(f"{name}_sd must be positive")
        solve_contour_exponent(self.eff0, self.tox1, self.eff_star, self.tox_star)
        return doses

    def standardized_doses(self) -> np.ndarray:
        return standardize_doses(self._validate())

    def contour_exponent(self) -> float:
        return solve_contour_exponent(self.eff0, self.tox1, self.eff_star, self.tox_star)

    def utility(self, pi_e, pi_t):
        return utility(pi_e, pi_t, self.eff0, self.tox1, self.contour_exponent())

    def _marginals(self, theta: np.ndarray, x: np.ndarray):
        """(pi_E, pi_T) arrays of shape (n_draws, n_doses)."""
        alpha, beta, gamma, zeta, eta = (theta[:, j][:, None] for j in range(5))
        with np.errstate(over="ignore"):
            pi_t = inverse_logit(alpha + beta * x[None, :])
            pi_e = inverse_logit(gamma + zeta * x[None, :] + eta * x[None, :] ** 2)
        return pi_e, pi_t

    def log_posterior(self, data: OutcomeSequence) -> TargetDensity:
        x = self.standardized_doses()
        self._check_data(data)
        # Aggregate outcome counts per (dose, efficacy, toxicity) cell.
        counts = np.zeros((self.num_doses, 2, 2))
        for rec in data.records:
            counts[rec.dose_level - 1, rec.efficacy, rec.toxicity] += 1.0
        used = np.argwhere(counts > 0)

        means = np.array([getattr(self, f"{n}_mean") for n in PARAM_NAMES])
        sds = np.array([getattr(self, f"{n}_sd") for n in PARAM_NAMES])

        def log_density(theta: np.ndarray) -> np.ndarray:
            lp = normal_logpdf(theta, means[None, :], sds[None, :]).sum(axis=1)
            if len(used):
                pi_e, pi_t = self._marginals(theta, x)
                psi = theta[:, 5]
                for k, a, b in used:
                    cell = joint_prob(a, b, pi_e[:, k], pi_t[:, k], psi)
                    lp = lp + counts[k, a, b] * np.log(np.clip(cell, _CLAMP, 1.0 - _CLAMP))
            return lp

        return TargetDensity(
            dim=6, log_density=log_density, parameter_names=PARAM_NAMES
        )

    def _check_data(self, data: OutcomeSequence):
        if data.alphabet is not Alphabet.QUATERNARY and len(data):
            raise ValueError("efficacy-toxicity models take E/T/B/N outcome data")
        for rec in data.records:
            if rec.dose_level > self.num_doses:
                raise ValueError(
                    f"dose_level {rec.dose_level} outside the {self.num_doses}-dose grid"
                )

    # ------------------------------------------------------------------- fit

    def fit(self, outcomes="", sampler: SamplerConfig | None = None) -> "EffToxModel":
        if isinstance(outcomes, str):
            data = parse_outcomes(outcomes, Alphabet.QUATERNARY)
        else:
            data = outcomes
        density = self.log_posterior(data)
        draws = sample(density, sampler or SamplerConfig())
        self._summarize(data, draws)
        return self

    def _summarize(self, data: OutcomeSequence, draws: PosteriorDraws):
        x = self.standardized_doses()
        k = self.num_doses
        pi_e, pi_t = self._marginals(draws.draws, x)
        p = self.contour_exponent()
        util_draws = utility(pi_e, pi_t, self.eff0, self.tox1, p)

        self.data_ = data
        self.draws_ = draws
        self.standardized_doses_ = x
        self.prob_eff_draws_ = pi_e
        self.prob_tox_draws_ = pi_t
        self.utility_draws_ = util_draws
        self.prob_eff_ = pi_e.mean(axis=0)
        self.prob_tox_ = pi_t.mean(axis=0)
        self.prob_acc_eff_ = (pi_e > self.efficacy_hurdle).mean(axis=0)
        self.prob_acc_tox_ = (pi_t < self.toxicity_hurdle).mean(axis=0)
        self.utility_ = utility(self.prob_eff_, self.prob_tox_, self.eff0, self.tox1, p)

        nominated = np.argmax(util_draws, axis=1)
        self.prob_obd_ = np.bincount(nominated, minlength=k) / len(nominated)
        self.modal_obd_ = int(np.argmax(self.prob_obd_)) + 1
        self.entropy_ = entropy(self.prob_obd_)

        dose_levels = np.arange(1, k + 1)
        prob_ok = (self.prob_acc_eff_ > self.p_e) & (self.prob_acc_tox_ > self.p_t)
        given = [r.dose_level for r in data.records]
        if given:
            adjacency = (dose_levels >= min(given) - 1) & (dose_levels <= max(given) + 1)
        else:
            adjacency = np.ones(k, dtype=bool)  # untried-trial fits rank all doses
        self.acceptable_ = prob_ok & adjacency

        self.num_patients_ = np.bincount([d - 1 for d in given], minlength=k)
        if np.any(self.acceptable_):
            masked = np.where(self.acceptable_, self.utility_, -np.inf)
            self.recommended_dose_ = int(np.argmax(masked)) + 1
        else:
            self.recommended_dose_ = None
        return self

    # ------------------------------------------------------------- summaries

    def superiority_matrix(self) -> np.ndarray:
        """M[r, c] = Pr(utility of dose c+1 strictly exceeds dose r+1); NaN diagonal."""
        u = self.utility_draws_
        k = u.shape[1]
        m = np.empty((k, k))
        for r in range(k):
            m[r] = (u > u[:, [r]]).mean(axis=0)
        np.fill_diagonal(m, np.nan)
        return m

    def contour_data(self, grid_resolution: int = 101) -> dict:
        """Utility surface on [0,1]^2 plus the posterior-mean dose points."""
        p = self.contour_exponent()
        pe = np.linspace(0.0, 1.0, grid_resolution)
        pt = np.linspace(0.0, 1.0, grid_resolution)
        ge, gt = np.meshgrid(pe, pt, indexing="ij")
        with np.errstate(divide="ignore"):
            u = utility(ge, gt, self.eff0, self.tox1, p)
        return {
            "prob_eff": pe.tolist(),
            "prob_tox": pt.tolist(),
            "utility": u.tolist(),
            "dose_points": [
                {
                    "dose_level": k + 1,
                    "prob_eff": float(self.prob_eff_[k]),
                    "prob_tox": float(self.prob_tox_[k]),
                    "utility": float(self.utility_[k]),
                }
                for k in range(self.num_doses)
            ],
        }

    def fit_summary(self) -> dict:
        return {
            "dose_levels": list(range(1, self.num_doses + 1)),
            "prob_eff": [float(v) for v in self.prob_eff_],
            "prob_tox": [float(v) for v in self.prob_tox_],
            "prob_acc_eff": [float(v) for v in self.prob_acc_eff_],
            "prob_acc_tox": [float(v) for v in self.prob_acc_tox_],
            "utility": [float(v) for v in self.utility_],
            "acceptable": [bool(v) for v in self.acceptable_],
            "prob_obd": [float(v) for v in self.prob_obd_],
            "recommended_dose": self.recommended_dose_,
            "entropy": float(self.entropy_),
        }

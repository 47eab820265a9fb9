"""Pydantic request schemas for the JSON API. Unknown fields are rejected."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SamplerModel(StrictModel):
    chains: int = 4
    warmup: int = 1000
    draws_per_chain: int = 1000
    seed: int = 1234
    adapt_target_accept: float = 0.35


class CrmSpecModel(StrictModel):
    skeleton: list[float]
    target: float
    model: Literal["empiric", "logistic", "logistic_gamma", "logistic2"] = "empiric"
    a0: Optional[float] = None
    beta_mean: float = 0.0
    beta_sd: Optional[float] = 1.0
    beta_shape: Optional[float] = None
    beta_rate: Optional[float] = None
    alpha_mean: Optional[float] = None
    alpha_sd: Optional[float] = None


class EffToxSpecModel(StrictModel):
    real_doses: list[float]
    efficacy_hurdle: float
    toxicity_hurdle: float
    p_e: float = 0.1
    p_t: float = 0.1
    eff0: float
    tox1: float
    eff_star: float
    tox_star: float
    alpha_mean: float
    alpha_sd: float
    beta_mean: float
    beta_sd: float
    gamma_mean: float
    gamma_sd: float
    zeta_mean: float
    zeta_sd: float
    eta_mean: float = 0.0
    eta_sd: float = 0.2
    psi_mean: float = 0.0
    psi_sd: float = 1.0


class AugBinPriorsModel(StrictModel):
    alpha_mean: float = 0.0
    alpha_sd: float = 1.0
    beta_mean: float = 0.0
    beta_sd: float = 1.0
    gamma_mean: float = 0.0
    gamma_sd: float = 1.0
    sigma_mean: float = 0.0
    sigma_sd: float = 1.0
    omega_lkj_eta: float = 1.0
    alpha_d1_mean: float = 0.0
    alpha_d1_sd: float = 1.0
    gamma_d1_mean: float = 0.0
    gamma_d1_sd: float = 1.0
    alpha_d2_mean: float = 0.0
    alpha_d2_sd: float = 1.0
    gamma_d2_mean: float = 0.0
    gamma_d2_sd: float = 1.0


class AugBinDataModel(StrictModel):
    z0: list[float]
    z1: list[float]
    z2: list[float]
    d1: list[int]
    d2: list[int]


class PolicyModel(StrictModel):
    name: Literal["default", "careful"] = "default"
    tox_threshold: Optional[float] = None
    certainty_threshold: Optional[float] = None
    reference_dose: int = 1


class CrmFitRequest(StrictModel):
    spec: CrmSpecModel
    outcomes: str = ""
    doses_given: Optional[list[int]] = None
    tox: Optional[list[int]] = None
    weights: Optional[list[float]] = None
    sampler: SamplerModel = Field(default_factory=SamplerModel)


class EffToxFitRequest(StrictModel):
    spec: EffToxSpecModel
    outcomes: str = ""
    include_contour: bool = False
    contour_resolution: int = 51
    sampler: SamplerModel = Field(default_factory=SamplerModel)


class AugBinFitRequest(StrictModel):
    priors: AugBinPriorsModel = Field(default_factory=AugBinPriorsModel)
    data: AugBinDataModel
    y2_upper: Optional[float] = None
    sampler: SamplerModel = Field(default_factory=lambda: SamplerModel(warmup=2500))


class CrmDtpRequest(StrictModel):
    spec: CrmSpecModel
    previous_outcomes: str = ""
    cohort_sizes: list[int]
    policy: PolicyModel = Field(default_factory=PolicyModel)
    next_dose: Optional[int] = None
    sampler: SamplerModel = Field(default_factory=SamplerModel)


class EffToxDtpRequest(StrictModel):
    spec: EffToxSpecModel
    previous_outcomes: str = ""
    cohort_sizes: list[int]
    policy: PolicyModel = Field(default_factory=PolicyModel)
    next_dose: Optional[int] = None
    sampler: SamplerModel = Field(default_factory=SamplerModel)


class NewdataModel(StrictModel):
    z0: list[float]
    z1: list[float]


class PredictRequest(StrictModel):
    priors: AugBinPriorsModel = Field(default_factory=AugBinPriorsModel)
    data: AugBinDataModel
    newdata: Optional[NewdataModel] = None
    y2_upper: Optional[float] = None
    probs: tuple[float, float] = (0.025, 0.975)
    sampler: SamplerModel = Field(default_factory=lambda: SamplerModel(warmup=2500))


class PriorPredictiveRequest(StrictModel):
    priors: AugBinPriorsModel = Field(default_factory=AugBinPriorsModel)
    num_samps: int = 1000
    z0_range: tuple[float, float] = (5.0, 10.0)
    seed: int = 0


class SessionCreateRequest(StrictModel):
    design: Literal["crm", "efftox"]
    crm_spec: Optional[CrmSpecModel] = None
    efftox_spec: Optional[EffToxSpecModel] = None
    outcomes: str = ""
    policy: PolicyModel = Field(default_factory=PolicyModel)
    sampler: SamplerModel = Field(default_factory=SamplerModel)


class OutcomeAppendRequest(StrictModel):
    outcomes: str
    revision: int

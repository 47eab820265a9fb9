"""JSON HTTP service exposing fits, predictions, pathways and trial sessions."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import asdict

import numpy as np
import pandas as pd
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import reports
from ..augbin import AugBinDataset, AugBinModel, binary_prob_success, prior_predictive_2t_1a
from ..crm import CrmModel
from ..efftox import EffToxModel
from ..mcmc import SamplerConfig, SamplingError
from ..outcomes import OutcomeParseError, from_vectors
from ..pathways import (
    NodeBudgetError,
    compute_dtps,
    default_policy,
    graph_document,
    make_careful_policy,
)
from . import schemas
from .sessions import RevisionConflict, SessionNotFound, SessionStore


def _json(payload, status_code: int = 200) -> Response:
    return Response(
        content=reports.canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def build_crm(spec: schemas.CrmSpecModel) -> CrmModel:
    return CrmModel(
        skeleton=tuple(spec.skeleton), target=spec.target, model=spec.model,
        a0=spec.a0, beta_mean=spec.beta_mean, beta_sd=spec.beta_sd,
        beta_shape=spec.beta_shape, beta_rate=spec.beta_rate,
        alpha_mean=spec.alpha_mean, alpha_sd=spec.alpha_sd,
    )


def build_efftox(spec: schemas.EffToxSpecModel) -> EffToxModel:
    return EffToxModel(**spec.model_dump())


def build_sampler(cfg: schemas.SamplerModel) -> SamplerConfig:
    return SamplerConfig(**cfg.model_dump())


def build_policy(policy: schemas.PolicyModel):
    if policy.name == "careful":
        if policy.tox_threshold is None or policy.certainty_threshold is None:
            raise ValueError(
                "careful policy requires tox_threshold and certainty_threshold"
            )
        return make_careful_policy(
            policy.tox_threshold, policy.certainty_threshold, policy.reference_dose
        )
    return default_policy


def build_augbin_dataset(data: schemas.AugBinDataModel) -> AugBinDataset:
    return AugBinDataset(
        tumour_size=np.column_stack([data.z0, data.z1, data.z2]),
        non_shrinkage_failure=np.column_stack([data.d1, data.d2]),
    )


def create_app(
    persist_dir=None,
    node_budget: int = 500,
    fit_timeout: float = 60.0,
) -> FastAPI:
    app = FastAPI(title="dosetrial", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(persist_dir)
    executor = ThreadPoolExecutor(max_workers=8)
    app.state.store = store

    def run_with_timeout(func, *args, **kwargs):
        future = executor.submit(func, *args, **kwargs)
        try:
            return future.result(timeout=fit_timeout)
        except FutureTimeout:
            raise SamplingError(f"fit exceeded the {fit_timeout:g}s request timeout")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "schema violation",
                                                      "detail": exc.errors()})

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        if isinstance(exc, NodeBudgetError):
            return JSONResponse(
                status_code=400,
                content={
                    "error": "node budget exceeded",
                    "node_count": exc.node_count,
                    "budget": exc.budget,
                },
            )
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(SessionNotFound)
    async def missing_session_handler(request: Request, exc: SessionNotFound):
        return JSONResponse(status_code=404, content={"error": "unknown session"})

    @app.exception_handler(RevisionConflict)
    async def conflict_handler(request: Request, exc: RevisionConflict):
        return JSONResponse(
            status_code=409,
            content={"error": str(exc), "revision": exc.expected},
        )

    @app.exception_handler(SamplingError)
    async def sampler_handler(request: Request, exc: SamplingError):
        return JSONResponse(status_code=500, content={"error": "sampler failure",
                                                      "detail": str(exc)})

    # ------------------------------------------------------------------ fits

    @app.post("/v1/fit/crm")
    def fit_crm(req: schemas.CrmFitRequest):
        model = build_crm(req.spec)
        config = build_sampler(req.sampler)
        if req.doses_given is not None:
            data = from_vectors(req.doses_given, req.tox or [], req.weights)
        else:
            data = req.outcomes
        run_with_timeout(model.fit, data, sampler=config)
        return _json(reports.crm_report(model, config.seed))

    @app.post("/v1/fit/efftox")
    def fit_efftox(req: schemas.EffToxFitRequest):
        model = build_efftox(req.spec)
        config = build_sampler(req.sampler)
        run_with_timeout(model.fit, req.outcomes, sampler=config)
        report = reports.efftox_report(model, config.seed)
        if req.include_contour:
            report["contour"] = model.contour_data(req.contour_resolution)
        return _json(report)

    @app.post("/v1/fit/augbin")
    def fit_augbin(req: schemas.AugBinFitRequest):
        model = AugBinModel(**req.priors.model_dump())
        dataset = build_augbin_dataset(req.data)
        config = build_sampler(req.sampler)
        run_with_timeout(model.fit, dataset, sampler=config)
        y2_upper = req.y2_upper if req.y2_upper is not None else float(np.log(0.7))
        predictions = model.predict(y2_upper=y2_upper)
        binary = binary_prob_success(model, y2_upper=y2_upper)
        return _json(reports.augbin_report(model, config.seed, predictions, binary))

    # ------------------------------------------------------------------ DTPs

    def dtp_response(model, req) -> Response:
        config = build_sampler(req.sampler)
        tree = run_with_timeout(
            compute_dtps,
            model,
            cohort_sizes=req.cohort_sizes,
            previous_outcomes=req.previous_outcomes,
            policy=build_policy(req.policy),
            next_dose=req.next_dose,
            sampler=config,
            node_budget=node_budget,
        )
        doc = graph_document(tree)
        doc["seed"] = config.seed
        return _json(doc)

    @app.post("/v1/dtp/crm")
    def dtp_crm(req: schemas.CrmDtpRequest):
        return dtp_response(build_crm(req.spec), req)

    @app.post("/v1/dtp/efftox")
    def dtp_efftox(req: schemas.EffToxDtpRequest):
        return dtp_response(build_efftox(req.spec), req)

    # ---------------------------------------------------------------- augbin

    @app.post("/v1/augbin/predict")
    def augbin_predict(req: schemas.PredictRequest):
        model = AugBinModel(**req.priors.model_dump())
        dataset = build_augbin_dataset(req.data)
        config = build_sampler(req.sampler)
        run_with_timeout(model.fit, dataset, sampler=config)
        y2_upper = req.y2_upper if req.y2_upper is not None else float(np.log(0.7))
        newdata = None
        if req.newdata is not None:
            newdata = pd.DataFrame({"z0": req.newdata.z0, "z1": req.newdata.z1})
        pred = model.predict(newdata=newdata, y2_upper=y2_upper, probs=req.probs)
        return _json(
            {
                "design": "augbin",
                "seed": config.seed,
                "predictions": pred.to_dict(orient="records"),
                "diagnostics": model.draws_.diagnostics,
            }
        )

    @app.post("/v1/augbin/prior-predictive")
    def augbin_prior_predictive(req: schemas.PriorPredictiveRequest):
        frame = prior_predictive_2t_1a(
            req.priors.model_dump(), num_samps=req.num_samps,
            z0_range=req.z0_range, seed=req.seed,
        )
        return _json(
            {
                "design": "augbin",
                "seed": req.seed,
                "samples": frame.to_dict(orient="records"),
            }
        )

    # -------------------------------------------------------------- sessions

    def session_model(session):
        if session.design == "crm":
            return build_crm(schemas.CrmSpecModel(**session.spec))
        return build_efftox(schemas.EffToxSpecModel(**session.spec))

    def session_fit_payload(session) -> dict:
        model = session_model(session)
        config = SamplerConfig(**session.sampler)
        policy = build_policy(schemas.PolicyModel(**session.policy))
        run_with_timeout(model.fit, session.history, sampler=config)
        if session.design == "crm":
            report = reports.crm_report(model, config.seed)
        else:
            report = reports.efftox_report(model, config.seed)
        recommendation = policy(model)
        return {"fit": report, "recommendation": recommendation}

    def session_view(session) -> dict:
        return {
            "session_id": session.session_id,
            "design": session.design,
            "spec": session.spec,
            "policy": session.policy,
            "seed": session.sampler["seed"],
            "revision": session.revision,
            "created_at": session.created_at,
            "updated_at": session.updated_at,
            "outcome_history": session.outcomes,
            "outcome_string": session.history,
            "latest": session.latest,
        }

    @app.post("/v1/sessions")
    def create_session(req: schemas.SessionCreateRequest):
        spec = req.crm_spec if req.design == "crm" else req.efftox_spec
        if spec is None:
            raise ValueError(f"session design {req.design!r} requires {req.design}_spec")
        if req.policy.name == "careful" and req.design != "crm":
            raise ValueError("careful escalation policy applies to CRM sessions")
        build_policy(req.policy)
        session = store.create(
            design=req.design,
            spec=spec.model_dump(),
            policy=req.policy.model_dump(),
            sampler=req.sampler.model_dump(),
        )
        if req.outcomes:
            latest = session_fit_payload_preview(session, req.outcomes)
            store.append_outcomes(session, req.outcomes, 0, latest)
        return _json(session_view(session), status_code=201)

    def session_fit_payload_preview(session, pending: str) -> dict:
        trial = type(session)(
            session_id=session.session_id,
            design=session.design,
            spec=session.spec,
            policy=session.policy,
            sampler=session.sampler,
            outcomes=session.outcomes + [pending],
        )
        return session_fit_payload(trial)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _json(session_view(store.get(session_id)))

    @app.post("/v1/sessions/{session_id}/outcomes")
    def append_outcomes(session_id: str, req: schemas.OutcomeAppendRequest):
        session = store.get(session_id)
        with store.lock(session_id):
            if req.revision != session.revision:
                raise RevisionConflict(session.revision, req.revision)
            latest = session_fit_payload_preview(session, req.outcomes)
            store.append_outcomes(session, req.outcomes, req.revision, latest)
            return _json(session_view(session))

    @app.get("/v1/sessions/{session_id}/dtp")
    def session_dtp(session_id: str, cohort_sizes: str, next_dose: int | None = None):
        session = store.get(session_id)
        sizes = [int(s) for s in cohort_sizes.split(",") if s]
        config = SamplerConfig(**session.sampler)
        tree = run_with_timeout(
            compute_dtps,
            session_model(session),
            cohort_sizes=sizes,
            previous_outcomes=session.history,
            policy=build_policy(schemas.PolicyModel(**session.policy)),
            next_dose=next_dose,
            sampler=config,
            node_budget=node_budget,
        )
        doc = graph_document(tree)
        doc["seed"] = config.seed
        doc["session_id"] = session.session_id
        return _json(doc)

    @app.get("/v1/sessions/{session_id}/contour")
    def session_contour(session_id: str, resolution: int = 51):
        session = store.get(session_id)
        if session.design != "efftox":
            raise ValueError("contour data is only available for efftox sessions")
        model = session_model(session)
        config = SamplerConfig(**session.sampler)
        run_with_timeout(model.fit, session.history, sampler=config)
        doc = model.contour_data(resolution)
        doc["seed"] = config.seed
        doc["session_id"] = session.session_id
        return _json(doc)

    @app.get("/v1/health")
    def health():
        return _json({"status": "ok"})

    return app

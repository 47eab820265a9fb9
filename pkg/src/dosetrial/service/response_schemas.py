"""Published response schemas for the JSON API.

The request schemas come from the pydantic models; these document what the
service emits. ``schema_for`` returns the schema a given endpoint's
response must validate against.
"""

from __future__ import annotations

_NUMBER_OR_NULL = {"type": ["number", "null"]}
_DIAGNOSTICS = {
    "type": "object",
    "additionalProperties": {
        "type": "object",
        "properties": {"split_rhat": {"type": ["number", "null"]}, "ess": {"type": "number"}},
        "required": ["split_rhat", "ess"],
    },
}
_ACCEPTANCE_RATES = {"type": "array", "items": {"type": "number"}}

_CRM_DOSE_ROW = {
    "type": "object",
    "properties": {
        "Dose": {"type": "integer"},
        "Skeleton": {"type": "number"},
        "N": {"type": "integer"},
        "Tox": {"type": "integer"},
        "ProbTox": {"type": "number"},
        "MedianProbTox": {"type": "number"},
        "ProbMTD": {"type": "number"},
    },
    "required": ["Dose", "Skeleton", "N", "Tox", "ProbTox", "MedianProbTox", "ProbMTD"],
    "additionalProperties": False,
}

_EFFTOX_DOSE_ROW = {
    "type": "object",
    "properties": {
        "Dose": {"type": "integer"},
        "N": {"type": "integer"},
        "ProbEff": {"type": "number"},
        "ProbTox": {"type": "number"},
        "ProbAccEff": {"type": "number"},
        "ProbAccTox": {"type": "number"},
        "Utility": {"type": "number"},
        "Acceptable": {"type": "boolean"},
        "ProbOBD": {"type": "number"},
    },
    "required": ["Dose", "N", "ProbEff", "ProbTox", "ProbAccEff", "ProbAccTox",
                  "Utility", "Acceptable", "ProbOBD"],
    "additionalProperties": False,
}

_CRM_PATIENT_ROW = {
    "type": "object",
    "properties": {
        "Patient": {"type": "integer"},
        "Dose": {"type": "integer"},
        "Toxicity": {"type": "integer"},
        "Weight": {"type": "number"},
    },
    "required": ["Patient", "Dose", "Toxicity", "Weight"],
    "additionalProperties": False,
}

_EFFTOX_PATIENT_ROW = {
    "type": "object",
    "properties": {
        "Patient": {"type": "integer"},
        "Dose": {"type": "integer"},
        "Toxicity": {"type": "integer"},
        "Efficacy": {"type": "integer"},
    },
    "required": ["Patient", "Dose", "Toxicity", "Efficacy"],
    "additionalProperties": False,
}

CRM_FIT_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "CrmFitResponse",
    "type": "object",
    "properties": {
        "design": {"const": "crm"},
        "spec": {"type": "object"},
        "seed": {"type": "integer"},
        "patients": {"type": "array", "items": _CRM_PATIENT_ROW},
        "doses": {"type": "array", "items": _CRM_DOSE_ROW},
        "target": {"type": "number"},
        "recommended_dose": {"type": ["integer", "null"]},
        "modal_mtd": {"type": "integer"},
        "entropy": {"type": "number"},
        "diagnostics": _DIAGNOSTICS,
        "acceptance_rates": _ACCEPTANCE_RATES,
    },
    "required": ["design", "spec", "seed", "patients", "doses", "target",
                  "recommended_dose", "modal_mtd", "entropy", "diagnostics",
                  "acceptance_rates"],
    "additionalProperties": False,
}

_CONTOUR = {
    "type": "object",
    "properties": {
        "prob_eff": {"type": "array", "items": {"type": "number"}},
        "prob_tox": {"type": "array", "items": {"type": "number"}},
        "utility": {"type": "array",
                     "items": {"type": "array", "items": {"type": ["number", "null"]}}},
        "dose_points": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "dose_level": {"type": "integer"},
                    "prob_eff": {"type": "number"},
                    "prob_tox": {"type": "number"},
                    "utility": {"type": "number"},
                },
                "required": ["dose_level", "prob_eff", "prob_tox", "utility"],
            },
        },
        "seed": {"type": "integer"},
        "session_id": {"type": "string"},
    },
    "required": ["prob_eff", "prob_tox", "utility", "dose_points"],
}

EFFTOX_FIT_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "EffToxFitResponse",
    "type": "object",
    "properties": {
        "design": {"const": "efftox"},
        "spec": {"type": "object"},
        "seed": {"type": "integer"},
        "patients": {"type": "array", "items": _EFFTOX_PATIENT_ROW},
        "doses": {"type": "array", "items": _EFFTOX_DOSE_ROW},
        "recommended_dose": {"type": ["integer", "null"]},
        "modal_obd": {"type": "integer"},
        "entropy": {"type": "number"},
        "superiority": {"type": "array",
                         "items": {"type": "array", "items": _NUMBER_OR_NULL}},
        "diagnostics": _DIAGNOSTICS,
        "acceptance_rates": _ACCEPTANCE_RATES,
        "contour": _CONTOUR,
    },
    "required": ["design", "spec", "seed", "patients", "doses",
                  "recommended_dose", "modal_obd", "entropy", "superiority",
                  "diagnostics", "acceptance_rates"],
    "additionalProperties": False,
}

_PREDICTION_ROW = {
    "type": "object",
    "properties": {
        "id": {"type": "integer"},
        "z0": {"type": "number"},
        "z1": {"type": "number"},
        "prob_success": {"type": "number"},
        "lower": {"type": "number"},
        "upper": {"type": "number"},
        "ci_width": {"type": "number"},
    },
    "required": ["id", "z0", "z1", "prob_success", "lower", "upper", "ci_width"],
    "additionalProperties": False,
}

AUGBIN_FIT_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "AugBinFitResponse",
    "type": "object",
    "properties": {
        "design": {"const": "augbin"},
        "spec": {"type": "object"},
        "seed": {"type": "integer"},
        "n": {"type": "integer"},
        "predictions": {"type": "array", "items": _PREDICTION_ROW},
        "binary": {
            "type": "object",
            "properties": {
                "method": {"const": "exact"},
                "x": {"type": "integer"},
                "n": {"type": "integer"},
                "mean": {"type": "number"},
                "lower": {"type": "number"},
                "upper": {"type": "number"},
                "ci_width": {"type": "number"},
            },
            "required": ["method", "x", "n", "mean", "lower", "upper", "ci_width"],
        },
        "diagnostics": _DIAGNOSTICS,
        "acceptance_rates": _ACCEPTANCE_RATES,
    },
    "required": ["design", "spec", "seed", "n", "predictions", "binary",
                  "diagnostics", "acceptance_rates"],
    "additionalProperties": False,
}

_FIT_SUMMARY = {
    "type": "object",
    "properties": {
        "dose_levels": {"type": "array", "items": {"type": "integer"}},
        "recommended_dose": {"type": ["integer", "null"]},
        "entropy": {"type": "number"},
        "prob_tox": {"type": "array", "items": {"type": "number"}},
        "median_prob_tox": {"type": "array", "items": {"type": "number"}},
        "prob_mtd": {"type": "array", "items": {"type": "number"}},
        "prob_eff": {"type": "array", "items": {"type": "number"}},
        "prob_acc_eff": {"type": "array", "items": {"type": "number"}},
        "prob_acc_tox": {"type": "array", "items": {"type": "number"}},
        "utility": {"type": "array", "items": {"type": "number"}},
        "acceptable": {"type": "array", "items": {"type": "boolean"}},
        "prob_obd": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["dose_levels", "recommended_dose", "entropy"],
    "additionalProperties": False,
}

DTP_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PathwayResponse",
    "type": "object",
    "properties": {
        "design": {"enum": ["crm", "efftox"]},
        "cohort_sizes": {"type": "array", "items": {"type": "integer"}},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "node": {"type": "integer"},
                    "parent": {"type": ["integer", "null"]},
                    "depth": {"type": "integer"},
                    "outcomes": {"type": "string"},
                    "dose_given": {"type": ["integer", "null"]},
                    "next_dose": {"type": ["integer", "null"]},
                    "color": {"type": "string"},
                    "fit_summary": _FIT_SUMMARY,
                    "prob_mtd_delta": {"type": "array", "items": {"type": "number"}},
                    "prob_obd_delta": {"type": "array", "items": {"type": "number"}},
                },
                "required": ["node", "parent", "depth", "outcomes", "dose_given",
                              "next_dose", "color", "fit_summary"],
                "additionalProperties": False,
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "from": {"type": "integer"},
                    "to": {"type": "integer"},
                    "label": {"type": "string"},
                },
                "required": ["from", "to", "label"],
            },
        },
        "seed": {"type": "integer"},
        "session_id": {"type": "string"},
    },
    "required": ["design", "cohort_sizes", "nodes", "edges"],
    "additionalProperties": False,
}

PREDICT_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PredictResponse",
    "type": "object",
    "properties": {
        "design": {"const": "augbin"},
        "seed": {"type": "integer"},
        "predictions": {"type": "array", "items": _PREDICTION_ROW},
        "diagnostics": _DIAGNOSTICS,
    },
    "required": ["design", "seed", "predictions", "diagnostics"],
    "additionalProperties": False,
}

PRIOR_PREDICTIVE_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PriorPredictiveResponse",
    "type": "object",
    "properties": {
        "design": {"const": "augbin"},
        "seed": {"type": "integer"},
        "samples": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "integer"},
                    "z0": {"type": "number"},
                    "y0": {"type": "number"},
                    "y1": {"type": "number"},
                    "y2": {"type": "number"},
                    "prob_d1": {"type": "number"},
                    "prob_d2": {"type": "number"},
                    "d1": {"type": "integer"},
                    "d2": {"type": "integer"},
                },
                "required": ["id", "z0", "y0", "y1", "y2", "prob_d1", "prob_d2",
                              "d1", "d2"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["design", "seed", "samples"],
    "additionalProperties": False,
}

SESSION_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SessionResponse",
    "type": "object",
    "properties": {
        "session_id": {"type": "string"},
        "design": {"enum": ["crm", "efftox"]},
        "spec": {"type": "object"},
        "policy": {"type": "object"},
        "seed": {"type": "integer"},
        "revision": {"type": "integer"},
        "created_at": {"type": "string"},
        "updated_at": {"type": "string"},
        "outcome_history": {"type": "array", "items": {"type": "string"}},
        "outcome_string": {"type": "string"},
        "latest": {
            "type": ["object", "null"],
            "properties": {
                "fit": {"type": "object"},
                "recommendation": {"type": ["integer", "null"]},
            },
            "required": ["fit", "recommendation"],
        },
    },
    "required": ["session_id", "design", "spec", "policy", "seed", "revision",
                  "created_at", "updated_at", "outcome_history", "outcome_string",
                  "latest"],
    "additionalProperties": False,
}

CONTOUR_RESPONSE = dict(_CONTOUR)
CONTOUR_RESPONSE.update({
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ContourResponse",
    "additionalProperties": False,
})

HEALTH_RESPONSE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "HealthResponse",
    "type": "object",
    "properties": {"status": {"const": "ok"}},
    "required": ["status"],
    "additionalProperties": False,
}

RESPONSE_SCHEMAS = {
    "fit_crm": CRM_FIT_RESPONSE,
    "fit_efftox": EFFTOX_FIT_RESPONSE,
    "fit_augbin": AUGBIN_FIT_RESPONSE,
    "dtp": DTP_RESPONSE,
    "augbin_predict": PREDICT_RESPONSE,
    "augbin_prior_predictive": PRIOR_PREDICTIVE_RESPONSE,
    "session": SESSION_RESPONSE,
    "contour": CONTOUR_RESPONSE,
    "health": HEALTH_RESPONSE,
}


def schema_for(name: str) -> dict:
    return RESPONSE_SCHEMAS[name]

"""Regenerate the JSON schemas shipped under schemas/.

Run from the repo root after changing any request or response model:
    python3 scripts/export_schemas.py
"""

import json
from pathlib import Path

from dosetrial.service import schemas as request_models
from dosetrial.service.response_schemas import RESPONSE_SCHEMAS

ROOT = Path(__file__).resolve().parent.parent / "schemas"

REQUESTS = {
    "fit_crm": request_models.CrmFitRequest,
    "fit_efftox": request_models.EffToxFitRequest,
    "fit_augbin": request_models.AugBinFitRequest,
    "dtp_crm": request_models.CrmDtpRequest,
    "dtp_efftox": request_models.EffToxDtpRequest,
    "augbin_predict": request_models.PredictRequest,
    "augbin_prior_predictive": request_models.PriorPredictiveRequest,
    "session_create": request_models.SessionCreateRequest,
    "session_outcomes": request_models.OutcomeAppendRequest,
}


def main():
    for sub in ("requests", "responses"):
        (ROOT / sub).mkdir(parents=True, exist_ok=True)
    for name, model in REQUESTS.items():
        path = ROOT / "requests" / f"{name}.json"
        path.write_text(json.dumps(model.model_json_schema(), indent=1) + "\n")
        print(f"wrote {path}")
    for name, schema in RESPONSE_SCHEMAS.items():
        path = ROOT / "responses" / f"{name}.json"
        path.write_text(json.dumps(schema, indent=1) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

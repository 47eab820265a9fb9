"""Record real service responses as console test fixtures.

Run from the repo root:  python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from dosetrial.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CRM_SPEC = {
    "skeleton": [0.05, 0.12, 0.25, 0.40, 0.55], "target": 0.25,
    "model": "logistic", "a0": 3, "beta_mean": 0, "beta_sd": 1.1576,
}
CRM_DTP_SPEC = {
    "skeleton": [0.05, 0.15, 0.25, 0.4, 0.6], "target": 0.25,
    "model": "empiric", "beta_mean": 0, "beta_sd": 1.0,
}
EFFTOX_SPEC = {
    "real_doses": [1.0, 2.0, 4.0, 6.6, 10.0],
    "efficacy_hurdle": 0.5, "toxicity_hurdle": 0.3, "p_e": 0.1, "p_t": 0.1,
    "eff0": 0.5, "tox1": 0.65, "eff_star": 0.7, "tox_star": 0.25,
    "alpha_mean": -7.9593, "alpha_sd": 3.5487,
    "beta_mean": 1.5482, "beta_sd": 3.5018,
    "gamma_mean": 0.7367, "gamma_sd": 2.5423,
    "zeta_mean": 3.4181, "zeta_sd": 2.4406,
    "eta_mean": 0, "eta_sd": 0.2, "psi_mean": 0, "psi_sd": 1,
}


def dump(name: str, payload):
    path = OUT / name
    path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    print(f"wrote {path}")


def main():
    client = TestClient(create_app(node_budget=500))

    # CRM session replaying the worked five-patient example.
    r = client.post("/v1/sessions", json={
        "design": "crm", "crm_spec": CRM_SPEC,
        "outcomes": "3N 5N 5T 3N 4N",
        "sampler": {"seed": 123},
    })
    r.raise_for_status() if hasattr(r, "raise_for_status") else None
    dump("crm_session.json", r.json())

    # EffTox session replaying the six-patient example.
    r = client.post("/v1/sessions", json={
        "design": "efftox", "efftox_spec": EFFTOX_SPEC,
        "outcomes": "1NNN 2ENN",
        "sampler": {"seed": 123, "draws_per_chain": 2000},
    })
    dump("efftox_session.json", r.json())
    efftox_sid = r.json()["session_id"]

    r = client.get(f"/v1/sessions/{efftox_sid}/contour", params={"resolution": 41})
    dump("efftox_contour.json", r.json())

    # Careful-escalation CRM session and its two-cohort pathway tree.
    r = client.post("/v1/sessions", json={
        "design": "crm", "crm_spec": CRM_DTP_SPEC,
        "outcomes": "2NN 3TN",
        "policy": {"name": "careful", "tox_threshold": 0.35,
                    "certainty_threshold": 0.7, "reference_dose": 1},
        "sampler": {"seed": 123, "draws_per_chain": 10000},
    })
    sid = r.json()["session_id"]
    r = client.get(f"/v1/sessions/{sid}/dtp", params={"cohort_sizes": "3,3"})
    dump("crm_dtp.json", r.json())

    # EffTox one-cohort pathway tree with the root dose already chosen.
    r = client.post("/v1/dtp/efftox", json={
        "spec": EFFTOX_SPEC, "previous_outcomes": "1NNN 2ENN",
        "cohort_sizes": [3], "next_dose": 3,
        "sampler": {"seed": 123, "warmup": 2000, "draws_per_chain": 2000},
    })
    dump("efftox_dtp.json", r.json())


if __name__ == "__main__":
    main()

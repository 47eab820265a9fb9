"""Fit reports: one dict shape per design, rendered to canonical JSON or text.

The CLI and the HTTP service both serialize through ``canonical_json`` so the
two surfaces emit byte-identical documents for identical requests and seeds.
Floats are written with 17 significant digits.
"""

from __future__ import annotations

import numpy as np
import pandas as pd


def _json_float(x: float) -> str:
    if not np.isfinite(x):
        return "null"
    out = format(float(x), ".17g")
    # ".17g" may yield bare exponents/integers; keep them valid JSON numbers
    return out


def canonical_json(obj) -> str:
    """Serialize to JSON with deterministic layout and 17-significant-digit floats."""
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def _write(obj, parts: list[str]):
    if obj is None:
        parts.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_json_float(float(obj)))
    elif isinstance(obj, str):
        import json as _json

        parts.append(_json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                parts.append(",")
            _write(str(k), parts)
            parts.append(":")
            _write(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, v in enumerate(seq):
            if i:
                parts.append(",")
            _write(v, parts)
        parts.append("]")
    elif isinstance(obj, pd.DataFrame):
        _write(obj.to_dict(orient="records"), parts)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to canonical JSON")


# ----------------------------------------------------------------- reports


def crm_report(fit, seed: int) -> dict:
    patients = [
        {"Patient": r.patient_index, "Dose": r.dose_level,
         "Toxicity": r.toxicity, "Weight": r.weight}
        for r in fit.data_.records
    ]
    doses = [
        {
            "Dose": k + 1,
            "Skeleton": float(fit.skeleton[k]),
            "N": int(fit.num_patients_[k]),
            "Tox": int(fit.num_toxicities_[k]),
            "ProbTox": float(fit.prob_tox_[k]),
            "MedianProbTox": float(fit.prob_tox_median_[k]),
            "ProbMTD": float(fit.prob_mtd_[k]),
        }
        for k in range(fit.num_doses)
    ]
    return {
        "design": "crm",
        "spec": _spec_echo(fit),
        "seed": seed,
        "patients": patients,
        "doses": doses,
        "target": float(fit.target),
        "recommended_dose": fit.recommended_dose_,
        "modal_mtd": fit.modal_mtd_,
        "entropy": float(fit.entropy_),
        "diagnostics": fit.draws_.diagnostics,
        "acceptance_rates": [float(a) for a in fit.draws_.acceptance_rates],
    }


def efftox_report(fit, seed: int) -> dict:
    patients = [
        {"Patient": r.patient_index, "Dose": r.dose_level,
         "Toxicity": r.toxicity, "Efficacy": r.efficacy}
        for r in fit.data_.records
    ]
    doses = [
        {
            "Dose": k + 1,
            "N": int(fit.num_patients_[k]),
            "ProbEff": float(fit.prob_eff_[k]),
            "ProbTox": float(fit.prob_tox_[k]),
            "ProbAccEff": float(fit.prob_acc_eff_[k]),
            "ProbAccTox": float(fit.prob_acc_tox_[k]),
            "Utility": float(fit.utility_[k]),
            "Acceptable": bool(fit.acceptable_[k]),
            "ProbOBD": float(fit.prob_obd_[k]),
        }
        for k in range(fit.num_doses)
    ]
    superiority = fit.superiority_matrix()
    return {
        "design": "efftox",
        "spec": _spec_echo(fit),
        "seed": seed,
        "patients": patients,
        "doses": doses,
        "recommended_dose": fit.recommended_dose_,
        "modal_obd": fit.modal_obd_,
        "entropy": float(fit.entropy_),
        "superiority": [
            [None if np.isnan(v) else float(v) for v in row] for row in superiority
        ],
        "diagnostics": fit.draws_.diagnostics,
        "acceptance_rates": [float(a) for a in fit.draws_.acceptance_rates],
    }


def augbin_report(fit, seed: int, predictions: pd.DataFrame, binary: dict) -> dict:
    return {
        "design": "augbin",
        "spec": _spec_echo(fit),
        "seed": seed,
        "n": fit.data_.n,
        "predictions": [
            {
                "id": int(row.id),
                "z0": float(row.z0),
                "z1": float(row.z1),
                "prob_success": float(row.prob_success),
                "lower": float(row.lower),
                "upper": float(row.upper),
                "ci_width": float(row.ci_width),
            }
            for row in predictions.itertuples()
        ],
        "binary": binary,
        "diagnostics": fit.draws_.diagnostics,
        "acceptance_rates": [float(a) for a in fit.draws_.acceptance_rates],
    }


def _spec_echo(fit) -> dict:
    spec = {}
    for key, value in fit.get_params().items():
        if isinstance(value, (tuple, np.ndarray)):
            value = list(value)
        spec[key] = value
    return spec


# ------------------------------------------------------------ text rendering


def _frame_block(rows: list[dict], float_cols: dict[str, str]) -> str:
    if not rows:
        return "(no rows)"
    frame = pd.DataFrame(rows)
    for col, fmt in float_cols.items():
        if col in frame:
            frame[col] = frame[col].map(lambda v: format(v, fmt))
    frame.index = np.arange(1, len(frame) + 1)
    return frame.to_string()


def crm_text(report: dict) -> str:
    parts = [
        _frame_block(report["patients"], {"Weight": ".4g"}),
        "",
        _frame_block(
            report["doses"],
            {"Skeleton": ".2f", "ProbTox": ".4f", "MedianProbTox": ".5f", "ProbMTD": ".3f"},
        ),
        "",
        f"The model targets a toxicity level of {report['target']:g}.",
        f"The dose with estimated toxicity probability closest to target is "
        f"{report['recommended_dose']}.",
        f"The dose most likely to be the MTD is {report['modal_mtd']}.",
        f"Model entropy: {report['entropy']:.2f}",
    ]
    return "\n".join(parts)


def efftox_text(report: dict) -> str:
    rec = report["recommended_dose"]
    rec_line = (
        f"The model recommends selecting dose-level {rec}."
        if rec is not None
        else "The model advocates stopping: no dose is acceptable."
    )
    parts = [
        _frame_block(report["patients"], {}),
        "",
        _frame_block(
            report["doses"],
            {
                "ProbEff": ".4f", "ProbTox": ".5f", "ProbAccEff": ".3f",
                "ProbAccTox": ".3f", "Utility": ".3f", "ProbOBD": ".4f",
            },
        ),
        "",
        rec_line,
        f"The dose most likely to be the OBD is {report['modal_obd']}.",
        f"Model entropy: {report['entropy']:.2f}",
    ]
    return "\n".join(parts)


def augbin_text(report: dict) -> str:
    binary = report["binary"]
    parts = [
        f"Fitted augmented binary model to {report['n']} patients.",
        "",
        _frame_block(
            report["predictions"],
            {"z0": ".3g", "z1": ".3g", "prob_success": ".3f", "lower": ".3f",
             "upper": ".3f", "ci_width": ".3f"},
        ),
        "",
        (
            f"Dichotomized comparator: {binary['x']} successes in {binary['n']} "
            f"({binary['mean']:.3g}), exact CI ({binary['lower']:.4f}, "
            f"{binary['upper']:.4f}), width {binary['ci_width']:.4f}."
        ),
    ]
    return "\n".join(parts)

"""Command-line interface: model fits, pathway tables, prior prediction, service."""

from __future__ import annotations

import functools
import sys

import click
import numpy as np
import pandas as pd

from . import reports
from .augbin import AugBinDataset, AugBinModel, binary_prob_success, prior_predictive_2t_1a
from .crm import CrmModel
from .efftox import EffToxModel
from .mcmc import SamplerConfig, SamplingError
from .outcomes import OutcomeParseError, from_vectors
from .pathways import (
    NodeBudgetError,
    compute_dtps,
    default_policy,
    export_graph,
    graph_document,
    make_careful_policy,
    spread_paths,
)

EXIT_VALIDATION = 2
EXIT_SAMPLER = 3


def _floats(_ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(float(v) for v in str(value).split(","))
    except ValueError:
        raise click.UsageError(f"--{param.name.replace('_', '-')}: expected comma-separated numbers")


def _ints(_ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(int(v) for v in str(value).split(","))
    except ValueError:
        raise click.UsageError(f"--{param.name.replace('_', '-')}: expected comma-separated integers")


def sampler_options(fn):
    @click.option("--chains", default=4, show_default=True)
    @click.option("--warmup", default=1000, show_default=True)
    @click.option("--draws", "draws_per_chain", default=1000, show_default=True,
                  help="Post-warmup draws per chain.")
    @click.option("--seed", default=1234, show_default=True)
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def output_options(fn):
    @click.option("--json", "json_out", type=str, default=None,
                  help="Write the JSON report to a file, or '-' for stdout.")
    @click.option("--csv", "csv_out", type=str, default=None,
                  help="Write the dose/prediction table to a CSV file.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def crm_spec_options(fn):
    @click.option("--skeleton", required=True, callback=_floats,
                  help="Prior DLT probabilities, e.g. 0.05,0.12,0.25,0.40,0.55.")
    @click.option("--target", type=float, required=True, help="Target toxicity rate.")
    @click.option("--model", "model_name", default="empiric", show_default=True,
                  type=click.Choice(["empiric", "logistic", "logistic_gamma", "logistic2"]))
    @click.option("--a0", type=float, default=None)
    @click.option("--beta-mean", type=float, default=0.0, show_default=True)
    @click.option("--beta-sd", type=float, default=1.0, show_default=True)
    @click.option("--beta-shape", type=float, default=None)
    @click.option("--beta-rate", type=float, default=None)
    @click.option("--alpha-mean", type=float, default=None)
    @click.option("--alpha-sd", type=float, default=None)
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def efftox_spec_options(fn):
    opts = [
        click.option("--real-doses", required=True, callback=_floats,
                     help="Physical doses, e.g. 1,2,4,6.6,10."),
        click.option("--efficacy-hurdle", type=float, required=True),
        click.option("--toxicity-hurdle", type=float, required=True),
        click.option("--p-e", type=float, default=0.1, show_default=True),
        click.option("--p-t", type=float, default=0.1, show_default=True),
        click.option("--eff0", type=float, required=True),
        click.option("--tox1", type=float, required=True),
        click.option("--eff-star", type=float, required=True),
        click.option("--tox-star", type=float, required=True),
    ]
    for name in ("alpha", "beta", "gamma", "zeta"):
        opts.append(click.option(f"--{name}-mean", type=float, required=True))
        opts.append(click.option(f"--{name}-sd", type=float, required=True))
    opts.append(click.option("--eta-mean", type=float, default=0.0, show_default=True))
    opts.append(click.option("--eta-sd", type=float, default=0.2, show_default=True))
    opts.append(click.option("--psi-mean", type=float, default=0.0, show_default=True))
    opts.append(click.option("--psi-sd", type=float, default=1.0, show_default=True))
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def augbin_prior_options(fn):
    pairs = [
        ("alpha", 1.0), ("beta", 1.0), ("gamma", 1.0),
        ("alpha-d1", 1.0), ("gamma-d1", 1.0), ("alpha-d2", 1.0), ("gamma-d2", 1.0),
    ]
    opts = []
    for name, sd in pairs:
        opts.append(click.option(f"--{name}-mean", type=float, default=0.0, show_default=True))
        opts.append(click.option(f"--{name}-sd", type=float, default=sd, show_default=True))
    opts.append(click.option("--sigma-mean", type=float, default=0.0, show_default=True))
    opts.append(click.option("--sigma-sd", type=float, default=1.0, show_default=True))
    opts.append(click.option("--omega-lkj-eta", type=float, default=1.0, show_default=True))
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _sampler(chains, warmup, draws_per_chain, seed) -> SamplerConfig:
    try:
        return SamplerConfig(chains=chains, warmup=warmup,
                             draws_per_chain=draws_per_chain, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _emit(report: dict, text: str, json_out, csv_out, table_key: str):
    click.echo(text)
    if json_out:
        payload = reports.canonical_json(report)
        if json_out == "-":
            click.echo(payload)
        else:
            with open(json_out, "w", encoding="utf-8") as fh:
                fh.write(payload)
    if csv_out:
        pd.DataFrame(report[table_key]).to_csv(csv_out, index=False)


def _run_fit(fn):
    """Map domain errors to the documented exit codes."""
    try:
        return fn()
    except (OutcomeParseError, ValueError) as exc:
        raise click.UsageError(str(exc))
    except SamplingError as exc:
        click.echo(f"sampler failure: {exc}", err=True)
        sys.exit(EXIT_SAMPLER)


@click.group()
@click.version_option(package_name="dosetrial", prog_name="dosetrial")
def main():
    """Bayesian adaptive dose-finding models, pathways, and trial service."""


# --------------------------------------------------------------------- fit


@main.group()
def fit():
    """Fit a dose-finding or response model and print its report."""


@fit.command("crm")
@crm_spec_options
@click.option("--outcomes", default="", help='Outcome string, e.g. "3N 5N 5T 3N 4N".')
@click.option("--doses-given", callback=_ints, default=None,
              help="Weighted fits: comma-separated dose-levels per patient.")
@click.option("--tox", callback=_ints, default=None,
              help="Weighted fits: comma-separated 0/1 toxicity indicators.")
@click.option("--weights", callback=_floats, default=None,
              help="Weighted fits: comma-separated evaluation weights in [0,1].")
@sampler_options
@output_options
def fit_crm(skeleton, target, model_name, a0, beta_mean, beta_sd, beta_shape,
            beta_rate, alpha_mean, alpha_sd, outcomes, doses_given, tox, weights,
            chains, warmup, draws_per_chain, seed, json_out, csv_out):
    """Continual reassessment method (optionally weighted / time-to-event)."""
    model = CrmModel(
        skeleton=skeleton, target=target, model=model_name, a0=a0,
        beta_mean=beta_mean, beta_sd=beta_sd, beta_shape=beta_shape,
        beta_rate=beta_rate, alpha_mean=alpha_mean, alpha_sd=alpha_sd,
    )
    config = _sampler(chains, warmup, draws_per_chain, seed)

    def run():
        if doses_given is not None:
            data = from_vectors(doses_given, tox or (), weights)
            model.fit(data, sampler=config)
        else:
            model.fit(outcomes, sampler=config)
        return reports.crm_report(model, config.seed)

    report = _run_fit(run)
    _emit(report, reports.crm_text(report), json_out, csv_out, "doses")


@fit.command("efftox")
@efftox_spec_options
@click.option("--outcomes", default="", help='Outcome string, e.g. "1NNN 2ENN".')
@click.option("--contour", "contour_out", default=None,
              help="Write utility contour samples to a CSV file.")
@sampler_options
@output_options
def fit_efftox(real_doses, efficacy_hurdle, toxicity_hurdle, p_e, p_t, eff0, tox1,
               eff_star, tox_star, alpha_mean, alpha_sd, beta_mean, beta_sd,
               gamma_mean, gamma_sd, zeta_mean, zeta_sd, eta_mean, eta_sd,
               psi_mean, psi_sd, outcomes, contour_out, chains, warmup,
               draws_per_chain, seed, json_out, csv_out):
    """Efficacy-toxicity trade-off model."""
    model = EffToxModel(
        real_doses=real_doses, efficacy_hurdle=efficacy_hurdle,
        toxicity_hurdle=toxicity_hurdle, p_e=p_e, p_t=p_t, eff0=eff0, tox1=tox1,
        eff_star=eff_star, tox_star=tox_star,
        alpha_mean=alpha_mean, alpha_sd=alpha_sd, beta_mean=beta_mean,
        beta_sd=beta_sd, gamma_mean=gamma_mean, gamma_sd=gamma_sd,
        zeta_mean=zeta_mean, zeta_sd=zeta_sd, eta_mean=eta_mean, eta_sd=eta_sd,
        psi_mean=psi_mean, psi_sd=psi_sd,
    )
    config = _sampler(chains, warmup, draws_per_chain, seed)
    report = _run_fit(lambda: (model.fit(outcomes, sampler=config),
                               reports.efftox_report(model, config.seed))[1])
    _emit(report, reports.efftox_text(report), json_out, csv_out, "doses")
    if contour_out:
        data = model.contour_data()
        rows = []
        for i, pe in enumerate(data["prob_eff"]):
            for j, pt in enumerate(data["prob_tox"]):
                rows.append({"prob_eff": pe, "prob_tox": pt,
                             "utility": data["utility"][i][j]})
        pd.DataFrame(rows).to_csv(contour_out, index=False)


@fit.command("augbin")
@augbin_prior_options
@click.option("--data", "data_path", required=True,
              help="CSV or JSON file with columns z0,z1,z2,d1,d2.")
@click.option("--y2-upper", type=float, default=float(np.log(0.7)), show_default=True,
              help="Success threshold on the final log tumour-size ratio.")
@click.option("--warmup", default=2500, show_default=True)
@click.option("--chains", default=4, show_default=True)
@click.option("--draws", "draws_per_chain", default=1000, show_default=True)
@click.option("--seed", default=1234, show_default=True)
@output_options
def fit_augbin(alpha_mean, alpha_sd, beta_mean, beta_sd, gamma_mean, gamma_sd,
               alpha_d1_mean, alpha_d1_sd, gamma_d1_mean, gamma_d1_sd,
               alpha_d2_mean, alpha_d2_sd, gamma_d2_mean, gamma_d2_sd,
               sigma_mean, sigma_sd, omega_lkj_eta, data_path, y2_upper,
               warmup, chains, draws_per_chain, seed, json_out, csv_out):
    """Augmented binary response model (two assessments, single arm)."""
    model = AugBinModel(
        alpha_mean=alpha_mean, alpha_sd=alpha_sd, beta_mean=beta_mean,
        beta_sd=beta_sd, gamma_mean=gamma_mean, gamma_sd=gamma_sd,
        sigma_mean=sigma_mean, sigma_sd=sigma_sd, omega_lkj_eta=omega_lkj_eta,
        alpha_d1_mean=alpha_d1_mean, alpha_d1_sd=alpha_d1_sd,
        gamma_d1_mean=gamma_d1_mean, gamma_d1_sd=gamma_d1_sd,
        alpha_d2_mean=alpha_d2_mean, alpha_d2_sd=alpha_d2_sd,
        gamma_d2_mean=gamma_d2_mean, gamma_d2_sd=gamma_d2_sd,
    )
    config = _sampler(chains, warmup, draws_per_chain, seed)

    def run():
        try:
            dataset = AugBinDataset.from_file(data_path)
        except FileNotFoundError:
            raise click.UsageError(f"--data: file not found: {data_path}")
        model.fit(dataset, sampler=config)
        predictions = model.predict(y2_upper=y2_upper)
        binary = binary_prob_success(model, y2_upper=y2_upper)
        return reports.augbin_report(model, config.seed, predictions, binary)

    report = _run_fit(run)
    _emit(report, reports.augbin_text(report), json_out, csv_out, "predictions")


# --------------------------------------------------------------------- dtp


def _dtp_common(model, cohort_sizes, previous_outcomes, policy_name, tox_threshold,
                certainty_threshold, reference_dose, next_dose, config, fmt, out,
                node_budget):
    if policy_name == "careful":
        if tox_threshold is None or certainty_threshold is None:
            raise click.UsageError(
                "--policy careful requires --tox-threshold and --certainty-threshold"
            )
        policy = make_careful_policy(tox_threshold, certainty_threshold, reference_dose)
    else:
        policy = default_policy

    def run():
        return compute_dtps(
            model, cohort_sizes=cohort_sizes, previous_outcomes=previous_outcomes,
            policy=policy, next_dose=next_dose, sampler=config,
            node_budget=node_budget,
        )

    tree = _run_fit(run)
    if fmt == "wide":
        frame = spread_paths(tree)
        text = frame.to_csv(index=False)
    elif fmt == "long":
        text = tree.to_long().to_csv(index=False)
    elif fmt == "dot":
        text = export_graph(tree, "dot")
    else:
        text = reports.canonical_json(graph_document(tree))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text)


def dtp_options(fn):
    @click.option("--cohort-sizes", required=True, callback=_ints,
                  help="Future cohort sizes, e.g. 3,3.")
    @click.option("--previous-outcomes", default="", help="Trial history so far.")
    @click.option("--policy", "policy_name", default="default", show_default=True,
                  type=click.Choice(["default", "careful"]))
    @click.option("--tox-threshold", type=float, default=None)
    @click.option("--certainty-threshold", type=float, default=None)
    @click.option("--reference-dose", type=int, default=1, show_default=True)
    @click.option("--next-dose", type=int, default=None,
                  help="Override the root decision (dose already chosen).")
    @click.option("--format", "fmt", default="wide", show_default=True,
                  type=click.Choice(["wide", "long", "dot", "json"]))
    @click.option("--out", default=None, help="Output file (stdout when omitted).")
    @click.option("--node-budget", type=int, default=None,
                  help="Reject expansions needing more model fits than this.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


@main.group()
def dtp():
    """Enumerate dose transition pathways for future cohorts."""


@dtp.command("crm")
@crm_spec_options
@dtp_options
@sampler_options
def dtp_crm(skeleton, target, model_name, a0, beta_mean, beta_sd, beta_shape,
            beta_rate, alpha_mean, alpha_sd, cohort_sizes, previous_outcomes,
            policy_name, tox_threshold, certainty_threshold, reference_dose,
            next_dose, fmt, out, node_budget, chains, warmup, draws_per_chain, seed):
    """Pathways for a CRM design."""
    model = CrmModel(
        skeleton=skeleton, target=target, model=model_name, a0=a0,
        beta_mean=beta_mean, beta_sd=beta_sd, beta_shape=beta_shape,
        beta_rate=beta_rate, alpha_mean=alpha_mean, alpha_sd=alpha_sd,
    )
    _dtp_common(model, cohort_sizes, previous_outcomes, policy_name, tox_threshold,
                certainty_threshold, reference_dose, next_dose,
                _sampler(chains, warmup, draws_per_chain, seed), fmt, out, node_budget)


@dtp.command("efftox")
@efftox_spec_options
@dtp_options
@sampler_options
def dtp_efftox(real_doses, efficacy_hurdle, toxicity_hurdle, p_e, p_t, eff0, tox1,
               eff_star, tox_star, alpha_mean, alpha_sd, beta_mean, beta_sd,
               gamma_mean, gamma_sd, zeta_mean, zeta_sd, eta_mean, eta_sd,
               psi_mean, psi_sd, cohort_sizes, previous_outcomes, policy_name,
               tox_threshold, certainty_threshold, reference_dose, next_dose,
               fmt, out, node_budget, chains, warmup, draws_per_chain, seed):
    """Pathways for an efficacy-toxicity design."""
    model = EffToxModel(
        real_doses=real_doses, efficacy_hurdle=efficacy_hurdle,
        toxicity_hurdle=toxicity_hurdle, p_e=p_e, p_t=p_t, eff0=eff0, tox1=tox1,
        eff_star=eff_star, tox_star=tox_star,
        alpha_mean=alpha_mean, alpha_sd=alpha_sd, beta_mean=beta_mean,
        beta_sd=beta_sd, gamma_mean=gamma_mean, gamma_sd=gamma_sd,
        zeta_mean=zeta_mean, zeta_sd=zeta_sd, eta_mean=eta_mean, eta_sd=eta_sd,
        psi_mean=psi_mean, psi_sd=psi_sd,
    )
    _dtp_common(model, cohort_sizes, previous_outcomes, policy_name, tox_threshold,
                certainty_threshold, reference_dose, next_dose,
                _sampler(chains, warmup, draws_per_chain, seed), fmt, out, node_budget)


# ------------------------------------------------------------------- augbin


@main.group()
def augbin():
    """Augmented binary utilities beyond fitting."""


@augbin.command("predict")
@augbin_prior_options
@click.option("--data", "data_path", required=True,
              help="CSV or JSON file with columns z0,z1,z2,d1,d2 (used to fit).")
@click.option("--newdata", "newdata_path", default=None,
              help="CSV file with columns z0,z1 to score instead of the fit data.")
@click.option("--y2-upper", type=float, default=float(np.log(0.7)), show_default=True)
@click.option("--warmup", default=2500, show_default=True)
@click.option("--chains", default=4, show_default=True)
@click.option("--draws", "draws_per_chain", default=1000, show_default=True)
@click.option("--seed", default=1234, show_default=True)
@output_options
def augbin_predict(alpha_mean, alpha_sd, beta_mean, beta_sd, gamma_mean, gamma_sd,
                   alpha_d1_mean, alpha_d1_sd, gamma_d1_mean, gamma_d1_sd,
                   alpha_d2_mean, alpha_d2_sd, gamma_d2_mean, gamma_d2_sd,
                   sigma_mean, sigma_sd, omega_lkj_eta, data_path, newdata_path,
                   y2_upper, warmup, chains, draws_per_chain, seed, json_out, csv_out):
    """Per-patient success probabilities with credible intervals."""
    model = AugBinModel(
        alpha_mean=alpha_mean, alpha_sd=alpha_sd, beta_mean=beta_mean,
        beta_sd=beta_sd, gamma_mean=gamma_mean, gamma_sd=gamma_sd,
        sigma_mean=sigma_mean, sigma_sd=sigma_sd, omega_lkj_eta=omega_lkj_eta,
        alpha_d1_mean=alpha_d1_mean, alpha_d1_sd=alpha_d1_sd,
        gamma_d1_mean=gamma_d1_mean, gamma_d1_sd=gamma_d1_sd,
        alpha_d2_mean=alpha_d2_mean, alpha_d2_sd=alpha_d2_sd,
        gamma_d2_mean=gamma_d2_mean, gamma_d2_sd=gamma_d2_sd,
    )
    config = _sampler(chains, warmup, draws_per_chain, seed)

    def run():
        try:
            dataset = AugBinDataset.from_file(data_path)
        except FileNotFoundError:
            raise click.UsageError(f"--data: file not found: {data_path}")
        model.fit(dataset, sampler=config)
        newdata = pd.read_csv(newdata_path) if newdata_path else None
        pred = model.predict(newdata=newdata, y2_upper=y2_upper)
        return {
            "design": "augbin",
            "seed": config.seed,
            "predictions": pred.to_dict(orient="records"),
            "diagnostics": model.draws_.diagnostics,
        }

    report = _run_fit(run)
    frame = pd.DataFrame(report["predictions"])
    click.echo(frame.to_string(index=False))
    if json_out:
        payload = reports.canonical_json(report)
        if json_out == "-":
            click.echo(payload)
        else:
            with open(json_out, "w", encoding="utf-8") as fh:
                fh.write(payload)
    if csv_out:
        frame.to_csv(csv_out, index=False)


@augbin.command("prior-predictive")
@augbin_prior_options
@click.option("--num-samps", default=1000, show_default=True)
@click.option("--z0-range", default="5,10", callback=_floats, show_default=True)
@click.option("--seed", default=0, show_default=True)
@output_options
def augbin_prior_predictive(alpha_mean, alpha_sd, beta_mean, beta_sd, gamma_mean,
                            gamma_sd, alpha_d1_mean, alpha_d1_sd, gamma_d1_mean,
                            gamma_d1_sd, alpha_d2_mean, alpha_d2_sd, gamma_d2_mean,
                            gamma_d2_sd, sigma_mean, sigma_sd, omega_lkj_eta,
                            num_samps, z0_range, seed, json_out, csv_out):
    """Sample tumour trajectories and failure events from the priors."""
    priors = dict(
        alpha_mean=alpha_mean, alpha_sd=alpha_sd, beta_mean=beta_mean,
        beta_sd=beta_sd, gamma_mean=gamma_mean, gamma_sd=gamma_sd,
        sigma_mean=sigma_mean, sigma_sd=sigma_sd, omega_lkj_eta=omega_lkj_eta,
        alpha_d1_mean=alpha_d1_mean, alpha_d1_sd=alpha_d1_sd,
        gamma_d1_mean=gamma_d1_mean, gamma_d1_sd=gamma_d1_sd,
        alpha_d2_mean=alpha_d2_mean, alpha_d2_sd=alpha_d2_sd,
        gamma_d2_mean=gamma_d2_mean, gamma_d2_sd=gamma_d2_sd,
    )

    def run():
        if len(z0_range) != 2:
            raise click.UsageError("--z0-range: expected two numbers, e.g. 5,10")
        return prior_predictive_2t_1a(priors, num_samps=num_samps,
                                      z0_range=z0_range, seed=seed)

    frame = _run_fit(run)
    click.echo(frame.head(20).to_string(index=False))
    if len(frame) > 20:
        click.echo(f"... {len(frame) - 20} more rows")
    if json_out:
        payload = reports.canonical_json(
            {"design": "augbin", "seed": seed, "samples": frame.to_dict(orient="records")}
        )
        if json_out == "-":
            click.echo(payload)
        else:
            with open(json_out, "w", encoding="utf-8") as fh:
                fh.write(payload)
    if csv_out:
        frame.to_csv(csv_out, index=False)


# -------------------------------------------------------------------- serve


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True, envvar="DOSETRIAL_HOST")
@click.option("--port", default=8000, show_default=True, envvar="DOSETRIAL_PORT")
@click.option("--persist-dir", default=None, envvar="DOSETRIAL_PERSIST_DIR",
              help="Directory for append-only session logs.")
@click.option("--node-budget", default=500, show_default=True,
              help="Maximum model fits per pathway request.")
@click.option("--fit-timeout", default=60.0, show_default=True,
              help="Per-request model-fit timeout in seconds.")
def serve(host, port, persist_dir, node_budget, fit_timeout):
    """Run the JSON HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(persist_dir=persist_dir, node_budget=node_budget,
                     fit_timeout=fit_timeout)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

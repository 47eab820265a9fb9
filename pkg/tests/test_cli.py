import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from dosetrial import simulate_scenario
from dosetrial.cli import main
from dosetrial.service import create_app

CRM_ARGS = [
    "fit", "crm",
    "--model", "logistic",
    "--skeleton", "0.05,0.12,0.25,0.40,0.55",
    "--target", "0.25",
    "--a0", "3",
    "--beta-mean", "0",
    "--beta-sd", "1.1576",
    "--outcomes", "3N 5N 5T 3N 4N",
    "--seed", "123",
]

EFFTOX_ARGS = [
    "fit", "efftox",
    "--real-doses", "1,2,4,6.6,10",
    "--efficacy-hurdle", "0.5", "--toxicity-hurdle", "0.3",
    "--eff0", "0.5", "--tox1", "0.65", "--eff-star", "0.7", "--tox-star", "0.25",
    "--alpha-mean", "-7.9593", "--alpha-sd", "3.5487",
    "--beta-mean", "1.5482", "--beta-sd", "3.5018",
    "--gamma-mean", "0.7367", "--gamma-sd", "2.5423",
    "--zeta-mean", "3.4181", "--zeta-sd", "2.4406",
    "--outcomes", "1NNN 2ENN",
    "--seed", "123",
]


@pytest.fixture()
def runner():
    return CliRunner()


class TestFitCrm:
    def test_paper_example_report(self, runner):
        result = runner.invoke(main, CRM_ARGS)
        assert result.exit_code == 0
        assert "The dose with estimated toxicity probability closest to target is 4." in result.output
        assert "ProbTox" in result.output and "ProbMTD" in result.output
        assert "Model entropy:" in result.output

    def test_prior_only_fit(self, runner):
        result = runner.invoke(
            main,
            ["fit", "crm", "--skeleton", "0.1,0.2,0.3", "--target", "0.2",
             "--outcomes", "", "--draws", "400", "--warmup", "400"],
        )
        assert result.exit_code == 0
        assert "(no rows)" in result.output  # empty patient table

    def test_missing_target_exits_2(self, runner):
        result = runner.invoke(main, ["fit", "crm", "--skeleton", "0.1,0.2"])
        assert result.exit_code == 2
        assert "target" in result.output

    def test_invalid_skeleton_exits_2(self, runner):
        result = runner.invoke(
            main, ["fit", "crm", "--skeleton", "0.3,0.2", "--target", "0.25"]
        )
        assert result.exit_code == 2

    def test_tite_vector_inputs(self, runner):
        result = runner.invoke(
            main,
            ["fit", "crm", "--model", "empiric",
             "--skeleton", "0.05,0.12,0.25,0.40,0.55", "--target", "0.25",
             "--beta-sd", "1.1576",
             "--doses-given", "3,3,3,3", "--tox", "0,0,0,0",
             "--weights", "0.5794,0.5238,0.2778,0.2222", "--seed", "123"],
        )
        assert result.exit_code == 0
        assert "closest to target is 4" in result.output

    def test_json_matches_http_byte_for_byte(self, runner, tmp_path):
        out = tmp_path / "fit.json"
        result = runner.invoke(main, CRM_ARGS + ["--json", str(out)])
        assert result.exit_code == 0
        cli_payload = out.read_bytes()

        client = TestClient(create_app())
        r = client.post(
            "/v1/fit/crm",
            json={
                "spec": {"skeleton": [0.05, 0.12, 0.25, 0.40, 0.55],
                          "target": 0.25, "model": "logistic", "a0": 3,
                          "beta_mean": 0, "beta_sd": 1.1576},
                "outcomes": "3N 5N 5T 3N 4N",
                "sampler": {"seed": 123},
            },
        )
        assert r.content == cli_payload

    def test_csv_output(self, runner, tmp_path):
        out = tmp_path / "doses.csv"
        result = runner.invoke(main, CRM_ARGS + ["--csv", str(out)])
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == [
            "Dose", "Skeleton", "N", "Tox", "ProbTox", "MedianProbTox", "ProbMTD",
        ]
        assert len(frame) == 5


class TestFitEfftox:
    def test_example_report(self, runner):
        result = runner.invoke(main, EFFTOX_ARGS + ["--draws", "2000"])
        assert result.exit_code == 0
        assert "The model recommends selecting dose-level 3." in result.output
        assert "ProbOBD" in result.output

    def test_contour_csv(self, runner, tmp_path):
        out = tmp_path / "contour.csv"
        result = runner.invoke(
            main, EFFTOX_ARGS + ["--draws", "400", "--warmup", "400",
                                  "--contour", str(out)]
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert set(frame.columns) == {"prob_eff", "prob_tox", "utility"}
        corner = frame[(frame.prob_eff == 1.0) & (frame.prob_tox == 0.0)]
        assert corner.utility.iloc[0] == pytest.approx(1.0)


class TestFitAugbin:
    def test_fit_from_csv(self, runner, tmp_path):
        ds = simulate_scenario(n=12, seed=1)
        path = tmp_path / "data.csv"
        ds.to_frame().to_csv(path, index=False)
        result = runner.invoke(
            main,
            ["fit", "augbin", "--data", str(path), "--warmup", "1200",
             "--draws", "400", "--seed", "3"],
        )
        assert result.exit_code == 0
        assert "prob_success" in result.output
        assert "Dichotomized comparator" in result.output

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["fit", "augbin", "--data", "/nope.csv"])
        assert result.exit_code == 2
        assert "--data" in result.output

    def test_predict_newdata(self, runner, tmp_path):
        ds = simulate_scenario(n=12, seed=2)
        path = tmp_path / "data.csv"
        ds.to_frame().to_csv(path, index=False)
        nd = tmp_path / "new.csv"
        pd.DataFrame({"z0": [5, 6], "z1": [4, 5]}).to_csv(nd, index=False)
        out = tmp_path / "pred.csv"
        result = runner.invoke(
            main,
            ["augbin", "predict", "--data", str(path), "--newdata", str(nd),
             "--warmup", "1200", "--draws", "400", "--seed", "3",
             "--csv", str(out)],
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert len(frame) == 2
        assert "ci_width" in frame.columns

    def test_prior_predictive(self, runner, tmp_path):
        out = tmp_path / "pp.csv"
        result = runner.invoke(
            main,
            ["augbin", "prior-predictive", "--num-samps", "50", "--seed", "7",
             "--csv", str(out)],
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert len(frame) == 50


class TestDtp:
    def test_wide_csv(self, runner, tmp_path):
        out = tmp_path / "paths.csv"
        result = runner.invoke(
            main,
            ["dtp", "crm", "--skeleton", "0.05,0.15,0.25,0.4,0.6",
             "--target", "0.25", "--beta-sd", "1",
             "--previous-outcomes", "2NN 3TN", "--cohort-sizes", "3",
             "--draws", "400", "--warmup", "400", "--seed", "11",
             "--out", str(out)],
        )
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert len(frame) == 4
        assert list(frame.columns) == [
            "outcomes0", "next_dose0", "outcomes1", "next_dose1",
        ]

    def test_cohort_size_one_gives_two_rows(self, runner):
        result = runner.invoke(
            main,
            ["dtp", "crm", "--skeleton", "0.1,0.25,0.4", "--target", "0.25",
             "--cohort-sizes", "1", "--draws", "400", "--warmup", "400"],
        )
        assert result.exit_code == 0
        lines = [l for l in result.output.strip().splitlines() if l]
        assert len(lines) == 3  # header + 2 paths

    def test_dot_output_matches_export(self, runner, tmp_path):
        out = tmp_path / "graph.dot"
        result = runner.invoke(
            main,
            ["dtp", "crm", "--skeleton", "0.1,0.25,0.4", "--target", "0.25",
             "--cohort-sizes", "1", "--draws", "400", "--warmup", "400",
             "--seed", "11", "--format", "dot", "--out", str(out)],
        )
        assert result.exit_code == 0
        from dosetrial import CrmModel, SamplerConfig, compute_dtps, export_graph

        tree = compute_dtps(
            CrmModel(skeleton=(0.1, 0.25, 0.4), target=0.25),
            cohort_sizes=[1],
            sampler=SamplerConfig(draws_per_chain=400, warmup=400, seed=11),
        )
        assert out.read_text() == export_graph(tree, "dot")

    def test_careful_policy_needs_thresholds(self, runner):
        result = runner.invoke(
            main,
            ["dtp", "crm", "--skeleton", "0.1,0.2", "--target", "0.2",
             "--cohort-sizes", "1", "--policy", "careful"],
        )
        assert result.exit_code == 2
        assert "tox-threshold" in result.output

    def test_node_budget(self, runner):
        result = runner.invoke(
            main,
            ["dtp", "crm", "--skeleton", "0.1,0.2", "--target", "0.2",
             "--cohort-sizes", "3,3,3", "--node-budget", "10"],
        )
        assert result.exit_code == 2
        assert "exceeding" in result.output

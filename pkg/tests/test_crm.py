import numpy as np
import pytest

from dosetrial import CrmModel, SamplerConfig, parse_outcomes, Alphabet

# Quadrature values for the five-dose logistic example with outcomes
# "3N 5N 5T 3N 4N", frozen from the grid oracle before the sampler existed.
ORACLE_PROB_TOX = np.array([0.031422, 0.064450, 0.128844, 0.218919, 0.339098])

SKELETON_32 = (0.05, 0.12, 0.25, 0.40, 0.55)


def logistic_32_model():
    return CrmModel(
        skeleton=SKELETON_32, target=0.25, model="logistic", a0=3,
        beta_mean=0.0, beta_sd=float(np.sqrt(1.34)),
    )


class TestCodifyDoses:
    def test_empiric_identity_at_zero_mean(self):
        m = CrmModel(skeleton=(0.05, 0.15, 0.25, 0.4, 0.6), model="empiric", beta_mean=0.0)
        np.testing.assert_allclose(m.codify_doses(), m.skeleton)

    def test_logistic_inversion(self):
        m = CrmModel(skeleton=(0.1, 0.25, 0.5), model="logistic", a0=3, beta_mean=0.0)
        labels = m.codify_doses()
        assert labels[1] == pytest.approx(np.log(0.25 / 0.75) - 3.0, abs=1e-12)

    def test_logistic2_midpoint(self):
        m = CrmModel(
            skeleton=(0.2, 0.5, 0.8), model="logistic2",
            alpha_mean=0.0, alpha_sd=1.0, beta_mean=0.0, beta_sd=1.0,
        )
        assert m.codify_doses()[1] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(model="empiric", beta_mean=0.4),
            dict(model="logistic", a0=3, beta_mean=-0.2),
            dict(model="logistic_gamma", a0=1, beta_shape=2.0, beta_rate=3.0),
            dict(model="logistic2", alpha_mean=0.5, alpha_sd=2.0, beta_mean=0.1),
        ],
    )
    def test_inversion_residual(self, kwargs):
        m = CrmModel(skeleton=(0.05, 0.12, 0.25, 0.40, 0.55), **kwargs)
        labels = m.codify_doses()
        if m.model == "empiric":
            theta_bar = np.array([[m.beta_mean]])
        elif m.model == "logistic":
            theta_bar = np.array([[m.beta_mean]])
        elif m.model == "logistic_gamma":
            theta_bar = np.array([[m.beta_shape / m.beta_rate]])
        else:
            theta_bar = np.array([[m.alpha_mean, m.beta_mean]])
        np.testing.assert_allclose(
            m.prob_tox_at(theta_bar)[0], m.skeleton, atol=1e-12
        )

    @pytest.mark.parametrize(
        "kwargs,fragment",
        [
            (dict(skeleton=(0.3, 0.2, 0.5)), "increasing"),
            (dict(skeleton=(0.1, 0.2, 1.1)), "increasing"),
            (dict(model="logistic"), "requires a0"),
            (dict(model="logistic_gamma", a0=1), "beta_shape"),
            (dict(model="logistic_gamma", a0=1, beta_shape=-1, beta_rate=2), "positive"),
            (dict(model="logistic2"), "alpha_mean"),
            (dict(target=0.0), "target"),
            (dict(model="probit"), "model"),
            (dict(model="empiric", a0=3), "does not use"),
            (dict(model="logistic", a0=3, beta_shape=2.0), "does not use"),
            (dict(model="logistic2", alpha_mean=0, alpha_sd=1, a0=2), "does not use"),
        ],
    )
    def test_invalid_specs(self, kwargs, fragment):
        base = dict(skeleton=(0.1, 0.2, 0.3), target=0.25)
        base.update(kwargs)
        with pytest.raises(ValueError, match=fragment):
            CrmModel(**base).codify_doses()


class TestLogPosterior:
    def test_empty_data_is_prior(self):
        m = logistic_32_model()
        target = m.log_posterior(parse_outcomes("", Alphabet.BINARY))
        theta = np.array([[-1.0], [0.0], [0.7]])
        expected = m._log_prior(theta)
        np.testing.assert_allclose(target.log_density(theta), expected, atol=1e-12)

    def test_single_toxicity_factor(self):
        m = logistic_32_model()
        target = m.log_posterior(parse_outcomes("2T", Alphabet.BINARY))
        theta = np.array([[0.3], [-0.5]])
        f = m.prob_tox_at(theta)[:, 1]
        expected = m._log_prior(theta) + np.log(f)
        np.testing.assert_allclose(target.log_density(theta), expected, atol=1e-12)

    def test_dose_outside_grid_rejected(self):
        m = logistic_32_model()
        with pytest.raises(ValueError, match="outside"):
            m.log_posterior(parse_outcomes("6N", Alphabet.BINARY))

    def test_quaternary_data_rejected(self):
        m = logistic_32_model()
        with pytest.raises(ValueError, match="binary"):
            m.fit(parse_outcomes("1EB", Alphabet.QUATERNARY))

    def test_weight_zero_toxicity_rejected(self):
        m = logistic_32_model()
        from dosetrial import from_vectors

        with pytest.raises(ValueError, match="weight-0"):
            m.fit(from_vectors([1], [1], [0.0]))


class TestFitAgainstOracle:
    def test_section_32_example(self):
        m = logistic_32_model()
        m.fit("3N 5N 5T 3N 4N", sampler=SamplerConfig(draws_per_chain=5000, seed=123))
        assert m.recommended_dose_ == 4
        np.testing.assert_allclose(m.prob_tox_, ORACLE_PROB_TOX, atol=0.01)

    def test_oracle_regression_empiric_prior_one_cohort(self):
        # E[prob_tox(d1)] after "1NNN"; value frozen from the grid oracle.
        m = CrmModel(
            skeleton=(0.05, 0.15, 0.25, 0.4, 0.6), target=0.25,
            model="empiric", beta_mean=0.0, beta_sd=1.0,
        )
        oracle = m.posterior_oracle("1NNN", resolution=8001)
        val = oracle.expectation(lambda th: m.prob_tox_at(th)[:, 0])
        assert val == pytest.approx(0.060355, abs=5e-5)

    def test_mcmc_matches_oracle_within_mc_error(self):
        m = logistic_32_model()
        m.fit("3N 5N 5T 3N 4N", sampler=SamplerConfig(draws_per_chain=5000, seed=7))
        oracle = m.posterior_oracle("3N 5N 5T 3N 4N", resolution=4001)
        for k in range(5):
            exact = oracle.expectation(lambda th, k=k: m.prob_tox_at(th)[:, k])
            sd = m.prob_tox_draws_[:, k].std()
            ess = m.draws_.diagnostics["beta"]["ess"]
            assert abs(m.prob_tox_[k] - exact) < max(3.0 * sd / np.sqrt(ess), 1e-3)

    def test_logistic2_against_2d_oracle(self):
        m = CrmModel(
            skeleton=(0.1, 0.25, 0.45), target=0.25, model="logistic2",
            alpha_mean=0.0, alpha_sd=1.5, beta_mean=0.0, beta_sd=0.8,
        )
        m.fit("1N 2N 2T", sampler=SamplerConfig(draws_per_chain=5000, seed=31))
        oracle = m.posterior_oracle("1N 2N 2T", resolution=601)
        for k in range(3):
            exact = oracle.expectation(lambda th, k=k: m.prob_tox_at(th)[:, k])
            assert m.prob_tox_[k] == pytest.approx(exact, abs=0.015)

    def test_logistic_gamma_prior_only_matches_oracle(self):
        m = CrmModel(
            skeleton=(0.1, 0.25, 0.45), target=0.25, model="logistic_gamma",
            a0=1.0, beta_shape=2.0, beta_rate=2.0,
        )
        m.fit("", sampler=SamplerConfig(draws_per_chain=5000, seed=13))
        oracle = m.posterior_oracle("", resolution=8001)
        for k in range(3):
            exact = oracle.expectation(lambda th, k=k: m.prob_tox_at(th)[:, k])
            assert m.prob_tox_[k] == pytest.approx(exact, abs=0.012)


class TestTite:
    def test_tite_example_recommends_dose_4(self):
        m = CrmModel(
            skeleton=SKELETON_32, target=0.25, model="empiric",
            beta_mean=0.0, beta_sd=float(np.sqrt(1.34)),
        )
        m.fit_tite(
            doses_given=[3, 3, 3, 3], tox=[0, 0, 0, 0],
            weights=[73 / 126, 66 / 126, 35 / 126, 28 / 126],
            sampler=SamplerConfig(seed=123),
        )
        assert m.recommended_dose_ == 4

    def test_unit_weights_reduce_to_plain_fit(self):
        cfg = SamplerConfig(seed=42, draws_per_chain=500, warmup=500)
        a = CrmModel(skeleton=SKELETON_32, model="empiric", beta_sd=1.0)
        a.fit_tite([3, 3, 4], [0, 1, 0], [1.0, 1.0, 1.0], sampler=cfg)
        b = CrmModel(skeleton=SKELETON_32, model="empiric", beta_sd=1.0)
        b.fit("3NT 4N", sampler=cfg)
        np.testing.assert_array_equal(a.prob_tox_, b.prob_tox_)

    def test_all_zero_weights_equal_prior(self):
        cfg = SamplerConfig(seed=8, draws_per_chain=500, warmup=500)
        a = CrmModel(skeleton=SKELETON_32, model="empiric", beta_sd=1.0)
        a.fit_tite([3, 3], [0, 0], [0.0, 0.0], sampler=cfg)
        b = CrmModel(skeleton=SKELETON_32, model="empiric", beta_sd=1.0)
        b.fit("", sampler=cfg)
        np.testing.assert_allclose(a.prob_tox_, b.prob_tox_, atol=1e-12)


class TestInvariants:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(model="empiric", beta_sd=1.0),
            dict(model="logistic", a0=3, beta_sd=1.0),
            dict(model="logistic_gamma", a0=1, beta_shape=2.0, beta_rate=2.0),
            dict(model="logistic2", alpha_mean=0.0, alpha_sd=1.0, beta_sd=1.0),
        ],
    )
    def test_monotone_toxicity_curves(self, kwargs):
        m = CrmModel(skeleton=(0.05, 0.12, 0.25, 0.40, 0.55), target=0.25, **kwargs)
        m.fit("1N 3T 5N", sampler=SamplerConfig(draws_per_chain=500, warmup=500, seed=3))
        diffs = np.diff(m.prob_tox_draws_, axis=1)
        assert np.all(diffs >= -1e-12)

    def test_prob_mtd_sums_to_one(self):
        m = logistic_32_model()
        m.fit("3N 5N 5T 3N 4N", sampler=SamplerConfig(seed=1))
        assert m.prob_mtd_.sum() == pytest.approx(1.0, abs=1e-12)

    def test_entropy_bounds(self):
        m = logistic_32_model()
        m.fit("", sampler=SamplerConfig(seed=2))
        assert 0.0 <= m.entropy_ <= np.log(m.num_doses) + 1e-12

    def test_skeleton_consistency_prior_fit(self):
        m = CrmModel(
            skeleton=(0.05, 0.15, 0.25, 0.4, 0.6), model="empiric", beta_sd=1.0
        )
        m.fit("", sampler=SamplerConfig(draws_per_chain=4000, seed=17))
        rng = np.random.default_rng(0)
        beta = rng.normal(0.0, 1.0, (200_000, 1))
        direct = m.prob_tox_at(beta).mean(axis=0)
        ess = m.draws_.diagnostics["beta"]["ess"]
        sd = m.prob_tox_draws_.std(axis=0)
        tol = 3.0 * sd / np.sqrt(ess) + 3.0 * sd / np.sqrt(200_000)
        np.testing.assert_array_less(np.abs(m.prob_tox_ - direct), tol)

    def test_entropy_of_paper_prob_mtd_vector(self):
        # Direct evaluation of -sum(p log p) on the printed ProbMTD vector.
        p = np.array([0.043, 0.074, 0.161, 0.246, 0.476])
        assert -np.sum(p * np.log(p)) == pytest.approx(1.320, abs=0.0005)

    def test_uniform_prob_mtd_entropy(self):
        p = np.full(5, 0.2)
        assert -np.sum(p * np.log(p)) == pytest.approx(np.log(5), abs=1e-12)

    def test_determinism(self):
        cfg = SamplerConfig(seed=77, draws_per_chain=300, warmup=300)
        a = logistic_32_model().fit("3N 5T", sampler=cfg)
        b = logistic_32_model().fit("3N 5T", sampler=cfg)
        np.testing.assert_array_equal(a.draws_.draws, b.draws_.draws)
        assert a.recommended_dose_ == b.recommended_dose_

    def test_fit_summary_snapshot(self):
        m = logistic_32_model().fit("3N", sampler=SamplerConfig(seed=5, draws_per_chain=200, warmup=200))
        snap = m.fit_summary()
        assert snap["recommended_dose"] == m.recommended_dose_
        assert len(snap["prob_tox"]) == 5

    def test_sklearn_params_roundtrip(self):
        from sklearn.base import clone

        m = logistic_32_model()
        c = clone(m)
        assert c.get_params() == m.get_params()

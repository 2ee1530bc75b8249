import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import piecewise_dataset
from fmtree.baselines import (
    BoostNode,
    MlrModel,
    TreeboostConfig,
    TreeboostModel,
    _stage_leaf_value,
    fit_mlr,
    fit_treeboost,
    huber_loss,
    mlr_from_json,
    mlr_to_json,
    predict_mlr,
    predict_mlr_dataset,
    predict_treeboost,
    predict_treeboost_dataset,
    treeboost_from_json,
    treeboost_to_json,
)
from fmtree.data import Dataset, Project, effort_vector, split_holdout


def step_dataset():
    projects = tuple(
        Project(f"s{i}", float(i + 1), 20.0, 3.0, 100.0 if i < 5 else 200.0)
        for i in range(10)
    )
    return Dataset(projects, "synthetic")


def log_linear_dataset(n=60, seed=2, noise_sd=0.0, coef_complexity=0.08):
    rng = np.random.default_rng(seed)
    size = rng.uniform(50.0, 400.0, n)
    productivity = rng.uniform(10.0, 35.0, n)
    complexity = rng.integers(1, 6, n).astype(float)
    log_effort = (
        1.2
        + 0.9 * np.log(size)
        + 0.015 * productivity
        + coef_complexity * complexity
        + rng.normal(0.0, noise_sd, n) * (noise_sd > 0)
    )
    projects = tuple(
        Project(
            f"m{i}", float(size[i]), float(productivity[i]), float(complexity[i]),
            float(np.exp(log_effort[i])),
        )
        for i in range(n)
    )
    return Dataset(projects, "synthetic")


class TestTreeboostConfig:
    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"n_trees": 0}, "n_trees"),
            ({"huber_quantile": 0.0}, "huber_quantile"),
            ({"huber_quantile": 1.5}, "huber_quantile"),
            ({"shrinkage": 0.0}, "shrinkage"),
            ({"shrinkage": 1.5}, "shrinkage"),
            ({"stochastic_fraction": 0.0}, "stochastic_fraction"),
            ({"influence_trimming": 1.0}, "influence_trimming"),
            ({"influence_trimming": -0.1}, "influence_trimming"),
            ({"max_depth": 0}, "max_depth"),
        ],
    )
    def test_rejects_bad_values(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            TreeboostConfig(**kwargs)


class TestHuberLoss:
    def test_hand_values(self):
        assert huber_loss(np.array([0.0]), np.array([1.0]), 2.0) == 0.5
        assert huber_loss(np.array([0.0]), np.array([3.0]), 2.0) == 4.0
        assert huber_loss(np.array([0.0, 0.0]), np.array([1.0, 3.0]), 2.0) == 2.25
        # boundary counts as quadratic: 0.5 * 2^2 == 2 * (2 - 1)
        assert huber_loss(np.array([0.0]), np.array([2.0]), 2.0) == 2.0

    def test_zero_delta_degrades_to_mean_absolute(self):
        assert huber_loss(np.array([0.0, 0.0]), np.array([1.0, 3.0]), 0.0) == 2.0


class TestStageLeafValue:
    def test_symmetric_values_give_median(self):
        assert _stage_leaf_value(np.array([1.0, 2.0, 3.0, 4.0]), 100.0) == 2.5

    def test_outlier_contribution_clipped_at_delta(self):
        assert _stage_leaf_value(np.array([0.0, 0.0, 0.0, 100.0]), 1.0) == 0.25

    def test_wide_delta_recovers_plain_mean(self):
        assert _stage_leaf_value(np.array([0.0, 0.0, 0.0, 100.0]), 200.0) == 25.0


class TestTreeboost:
    def test_single_stump_fits_step_exactly(self):
        config = TreeboostConfig(
            n_trees=5, shrinkage=1.0, stochastic_fraction=1.0,
            influence_trimming=0.0, max_depth=1,
        )
        data = step_dataset()
        model = fit_treeboost(data, config)
        assert model.f0 == 150.0
        assert len(model.trees) == 1
        assert model.loss_trace == [0.0]
        assert_allclose(predict_treeboost_dataset(model, data), effort_vector(data))

    def test_constant_efforts_need_no_trees(self):
        projects = tuple(Project(f"c{i}", float(i + 1), 20.0, 3.0, 500.0) for i in range(12))
        model = fit_treeboost(Dataset(projects, "synthetic"), TreeboostConfig(n_trees=50))
        assert model.trees == []
        assert model.f0 == 500.0
        assert predict_treeboost(model, projects[0]) == 500.0

    def test_vanishing_shrinkage_stays_at_median(self):
        data = piecewise_dataset()
        median = float(np.median(effort_vector(data)))
        model = fit_treeboost(data, TreeboostConfig(n_trees=1, shrinkage=1e-12))
        assert_allclose(predict_treeboost_dataset(model, data), median, rtol=1e-6)
        model = fit_treeboost(data, TreeboostConfig(n_trees=50, shrinkage=1e-9))
        assert_allclose(predict_treeboost_dataset(model, data), median, rtol=1e-6)

    def test_single_leaf_series_arithmetic(self):
        model = TreeboostModel(f0=100.0, shrinkage=0.1, trees=[BoostNode(value=5.0)])
        assert predict_treeboost(model, Project("p", 100.0, 20.0, 3.0, 1.0)) == 100.5

    def test_loss_trace_non_increasing(self):
        train, _ = split_holdout(piecewise_dataset(), 59, seed=2014)
        config = TreeboostConfig(n_trees=200, stochastic_fraction=1.0, influence_trimming=0.0)
        trace = np.array(fit_treeboost(train, config).loss_trace)
        assert len(trace) == 200
        assert np.all(np.diff(trace) <= 1e-9 * trace[:-1])

    def test_same_seed_same_model(self):
        train, _ = split_holdout(piecewise_dataset(), 59, seed=2014)
        config = TreeboostConfig(n_trees=40, seed=17)
        first = treeboost_to_json(fit_treeboost(train, config))
        second = treeboost_to_json(fit_treeboost(train, config))
        assert first == second

    def test_influence_trimming_drops_smallest_residuals(self):
        train, test = split_holdout(piecewise_dataset(), 59, seed=2014)
        config = TreeboostConfig(n_trees=60, influence_trimming=0.2)
        model = fit_treeboost(train, config)
        assert len(model.trees) == 60
        predictions = predict_treeboost_dataset(model, test)
        assert np.all(np.isfinite(predictions))

    def test_prediction_floor(self):
        model = TreeboostModel(f0=0.25, shrinkage=0.1)
        assert predict_treeboost(model, Project("p", 100.0, 20.0, 3.0, 1.0)) == 1.0

    def test_too_few_projects(self):
        with pytest.raises(ValueError, match="at least 10"):
            fit_treeboost(Dataset(step_dataset().projects[:9], "synthetic"))

    def test_json_round_trip(self):
        train, test = split_holdout(piecewise_dataset(), 59, seed=2014)
        model = fit_treeboost(train, TreeboostConfig(n_trees=50))
        restored = treeboost_from_json(json.loads(json.dumps(treeboost_to_json(model))))
        assert restored.f0 == model.f0
        assert restored.loss_trace == []
        assert_allclose(
            predict_treeboost_dataset(restored, test),
            predict_treeboost_dataset(model, test),
            rtol=0,
        )

    def test_from_json_rejects_other_kinds(self):
        with pytest.raises(ValueError, match="expected model kind 'treeboost'"):
            treeboost_from_json({"kind": "mlr"})


class TestMlr:
    def test_recovers_exact_log_linear_coefficients(self):
        model = fit_mlr(log_linear_dataset())
        assert model.intercept == pytest.approx(1.2, abs=1e-6)
        assert model.coef_ln_size == pytest.approx(0.9, abs=1e-6)
        assert model.coef_productivity == pytest.approx(0.015, abs=1e-6)
        assert model.coef_complexity == pytest.approx(0.08, abs=1e-6)
        assert model.adjusted_r2 == pytest.approx(1.0, abs=1e-9)

    def test_prediction_is_exp_of_score(self):
        model = fit_mlr(log_linear_dataset())
        project = Project("q", 180.0, 22.0, 4.0, 1.0)
        score = (
            model.intercept
            + model.coef_ln_size * math.log(180.0)
            + model.coef_productivity * 22.0
            + model.coef_complexity * 4.0
        )
        assert predict_mlr(model, project) == math.exp(score)

    def test_intercept_only_model(self):
        model = MlrModel(1.8, 0.0, 0.0, 0.0, 0.0, {}, {}, {})
        assert predict_mlr(model, Project("q", 50.0, 15.0, 2.0, 1.0)) == 6.0496474644129465

    def test_hand_coefficients_evaluated(self):
        model = MlrModel(1.8, 1.24, 0.007, 0.12, 0.0, {}, {}, {})
        project = Project("q", 100.0, 10.0, 2.0, 1.0)
        assert predict_mlr(model, project) == pytest.approx(2490.929045779924)

    def test_residuals_orthogonal_to_design(self):
        data = log_linear_dataset(noise_sd=0.3)
        model = fit_mlr(data)
        features = np.array([p.features() for p in data])
        x = np.column_stack(
            [np.ones(len(data)), np.log(features[:, 0]), features[:, 1], features[:, 2]]
        )
        beta = np.array(
            [model.intercept, model.coef_ln_size, model.coef_productivity, model.coef_complexity]
        )
        residuals = np.log(effort_vector(data)) - x @ beta
        assert_allclose(x.T @ residuals, 0.0, atol=1e-8)

    def test_vif_near_one_for_independent_predictors(self):
        model = fit_mlr(log_linear_dataset(n=1000, seed=4, noise_sd=0.2))
        assert all(v < 1.1 for v in model.vif.values())

    def test_collinear_predictors_rejected(self):
        rng = np.random.default_rng(5)
        projects = tuple(
            Project(f"c{i}", float(rng.uniform(50, 400)), 2.0 * c, c, float(rng.uniform(100, 5000)))
            for i, c in enumerate(rng.integers(1, 6, 30).astype(float))
        )
        with pytest.raises(ValueError, match="collinear"):
            fit_mlr(Dataset(projects, "synthetic"))

    def test_p_values_flag_the_null_predictor(self):
        data = log_linear_dataset(n=400, seed=1, noise_sd=0.2, coef_complexity=0.0)
        model = fit_mlr(data)
        assert model.p_values["ln_size"] < 1e-10
        assert model.p_values["productivity"] < 1e-10
        assert model.p_values["complexity"] > 0.05
        doc = mlr_to_json(model)
        assert doc["diagnostics"]["significant"]["ln_size"] is True
        assert doc["diagnostics"]["significant"]["complexity"] is False
        assert doc["diagnostics"]["vif_alarms"] == {
            "ln_size": False, "productivity": False, "complexity": False,
        }

    def test_too_few_projects(self):
        with pytest.raises(ValueError, match="at least 5"):
            fit_mlr(Dataset(log_linear_dataset().projects[:4], "synthetic"))

    def test_json_round_trip(self):
        data = log_linear_dataset(noise_sd=0.25)
        model = fit_mlr(data)
        restored = mlr_from_json(json.loads(json.dumps(mlr_to_json(model))))
        assert restored == model
        assert_allclose(predict_mlr_dataset(restored, data), predict_mlr_dataset(model, data), rtol=0)

    def test_from_json_rejects_other_kinds(self):
        with pytest.raises(ValueError, match="expected model kind 'mlr'"):
            mlr_from_json({"kind": "fmt"})

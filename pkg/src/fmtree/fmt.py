"""Hybrid pipeline: fuzzy memberships route a model tree over raw features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FEATURE_NAMES, Dataset, Project, effort_vector, feature_matrix
from .fcm import (
    FcmConfig,
    FuzzyInferenceModel,
    Standardization,
    build_fuzzy_model,
    fcm_cluster,
    membership_matrix,
)
from .mtree import ModelTree, TreeConfig, build_tree, prune, smooth_predict, tree_from_json, tree_to_json

EFFORT_FLOOR_PH = 1.0


@dataclass
class FmtModel:
    """Trained estimator: fuzzy membership model plus the tree routed on it."""

    fuzzy: FuzzyInferenceModel
    tree: ModelTree
    fcm_config: FcmConfig
    tree_config: TreeConfig
    feature_names: tuple[str, ...] = FEATURE_NAMES

    @property
    def standardization(self) -> Standardization | None:
        return self.fuzzy.standardization


def train_fmt(
    train: Dataset,
    fcm_config: FcmConfig = FcmConfig(),
    tree_config: TreeConfig = TreeConfig(),
) -> FmtModel:
    """Fit the full pipeline on a training dataset.

    Features are z-scored, clustered with FCM, and turned into Gaussian
    membership functions; the model tree then routes on the resulting
    membership columns while leaf models regress effort on the raw features.
    """
    if len(train) < max(fcm_config.k, tree_config.min_instances):
        raise ValueError(
            f"training set of {len(train)} is smaller than required by "
            f"k={fcm_config.k} / min_instances={tree_config.min_instances}"
        )
    features = feature_matrix(train)
    efforts = effort_vector(train)
    standardization = Standardization.fit(features)
    z = standardization.apply(features)
    partition = fcm_cluster(z, fcm_config)
    fuzzy = build_fuzzy_model(partition, z, standardization)
    memberships = membership_matrix(fuzzy, features)
    tree = prune(build_tree(memberships, features, efforts, tree_config), tree_config)
    return FmtModel(fuzzy, tree, fcm_config, tree_config)


def predict_fmt(model: FmtModel, project: Project) -> float:
    """Estimate effort (PH) for one project; outputs are floored at 1 PH."""
    row = np.asarray(project.features(), dtype=float)
    memberships = membership_matrix(model.fuzzy, row[None, :])[0]
    prediction = smooth_predict(model.tree, memberships, row, model.tree_config)
    return max(prediction, EFFORT_FLOOR_PH)


def predict_fmt_dataset(model: FmtModel, dataset: Dataset) -> np.ndarray:
    return np.array([predict_fmt(model, p) for p in dataset])


def fmt_to_json(model: FmtModel) -> dict:
    return {
        "kind": "fmt",
        "feature_names": list(model.feature_names),
        "fcm_config": {
            "k": model.fcm_config.k,
            "fuzzifier_m": model.fcm_config.fuzzifier_m,
            "tolerance": model.fcm_config.tolerance,
            "max_iterations": model.fcm_config.max_iterations,
            "seed": model.fcm_config.seed,
        },
        "tree_config": {
            "min_instances": model.tree_config.min_instances,
            "sd_fraction": model.tree_config.sd_fraction,
            "smoothing_k": model.tree_config.smoothing_k,
            "pruning_factor": model.tree_config.pruning_factor,
        },
        "fuzzy": model.fuzzy.to_json(),
        "tree": tree_to_json(model.tree),
    }


def fmt_from_json(doc: dict) -> FmtModel:
    if doc.get("kind") != "fmt":
        raise ValueError(f"expected model kind 'fmt', got {doc.get('kind')!r}")
    return FmtModel(
        FuzzyInferenceModel.from_json(doc["fuzzy"]),
        tree_from_json(doc["tree"]),
        FcmConfig(**doc["fcm_config"]),
        TreeConfig(**doc["tree_config"]),
        tuple(doc["feature_names"]),
    )

"""Reference estimators: Huber-loss stochastic gradient boosting and log-space MLR."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .data import Dataset, Project, effort_vector, feature_matrix
from .fmt import EFFORT_FLOOR_PH

MLR_PREDICTORS = ("ln_size", "productivity", "complexity")
VIF_ALARM = 4.0


@dataclass(frozen=True)
class TreeboostConfig:
    n_trees: int = 1000
    huber_quantile: float = 0.95
    shrinkage: float = 0.1
    stochastic_fraction: float = 0.5
    influence_trimming: float = 0.01
    max_depth: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be at least 1, got {self.n_trees}")
        if not 0.0 < self.huber_quantile <= 1.0:
            raise ValueError(f"huber_quantile must be in (0, 1], got {self.huber_quantile}")
        if not 0.0 < self.shrinkage <= 1.0:
            raise ValueError(f"shrinkage must be in (0, 1], got {self.shrinkage}")
        if not 0.0 < self.stochastic_fraction <= 1.0:
            raise ValueError(
                f"stochastic_fraction must be in (0, 1], got {self.stochastic_fraction}"
            )
        if not 0.0 <= self.influence_trimming < 1.0:
            raise ValueError(
                f"influence_trimming must be in [0, 1), got {self.influence_trimming}"
            )
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be at least 1, got {self.max_depth}")


@dataclass
class BoostNode:
    """Constant-leaf regression tree node for boosting stages."""

    value: float = 0.0
    feature: int | None = None
    threshold: float | None = None
    left: "BoostNode | None" = None
    right: "BoostNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class TreeboostModel:
    """f0 plus a series of shallow trees; shrinkage scales every tree output."""

    f0: float
    shrinkage: float
    trees: list[BoostNode] = field(default_factory=list)
    loss_trace: list[float] = field(default_factory=list)


def huber_loss(targets: np.ndarray, predictions: np.ndarray, delta: float) -> float:
    """Mean Huber loss: quadratic within delta of zero, linear beyond."""
    residuals = np.abs(np.asarray(targets, float) - np.asarray(predictions, float))
    if delta <= 0:
        return float(np.mean(residuals))
    quad = residuals <= delta
    out = np.where(quad, 0.5 * residuals**2, delta * (residuals - 0.5 * delta))
    return float(np.mean(out))


def _stage_leaf_value(diff: np.ndarray, delta: float) -> float:
    """Huber location step: median plus a clipped mean offset around it."""
    med = float(np.median(diff))
    centered = diff - med
    return med + float(np.mean(np.sign(centered) * np.minimum(np.abs(centered), delta)))


def _grow_stage_tree(
    x: np.ndarray, residuals: np.ndarray, depth_left: int
) -> BoostNode:
    node = BoostNode()
    n = len(residuals)
    if depth_left == 0 or n < 2 or float(np.ptp(residuals)) == 0.0:
        return node
    best: tuple[float, int, float] | None = None
    parent_sse = float(np.sum(residuals**2)) - n * float(np.mean(residuals)) ** 2
    for f in range(x.shape[1]):
        values = x[:, f]
        order = np.argsort(values, kind="stable")
        vs = values[order]
        rs = residuals[order]
        cum = np.cumsum(rs)
        cum2 = np.cumsum(rs * rs)
        total, total2 = cum[-1], cum2[-1]
        cuts = np.arange(1, n)
        nl = cuts.astype(float)
        nr = n - nl
        sse = (cum2[cuts - 1] - cum[cuts - 1] ** 2 / nl) + (
            (total2 - cum2[cuts - 1]) - (total - cum[cuts - 1]) ** 2 / nr
        )
        gain = parent_sse - sse
        gain[vs[cuts] == vs[cuts - 1]] = -np.inf
        j = int(np.argmax(gain))
        if not np.isfinite(gain[j]) or gain[j] <= 0.0:
            continue
        if best is None or gain[j] > best[0]:
            best = (float(gain[j]), f, float((vs[cuts[j] - 1] + vs[cuts[j]]) / 2.0))
    if best is None:
        return node
    _, node.feature, node.threshold = best
    mask = x[:, node.feature] <= node.threshold
    node.left = _grow_stage_tree(x[mask], residuals[mask], depth_left - 1)
    node.right = _grow_stage_tree(x[~mask], residuals[~mask], depth_left - 1)
    return node


def _leaf_of(node: BoostNode, row: np.ndarray) -> BoostNode:
    while not node.is_leaf:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node


def _apply_stage(node: BoostNode, x: np.ndarray) -> np.ndarray:
    return np.array([_leaf_of(node, row).value for row in x])


def _leaf_ids(node: BoostNode, x: np.ndarray) -> list[BoostNode]:
    return [_leaf_of(node, row) for row in x]


def fit_treeboost(train: Dataset, config: TreeboostConfig = TreeboostConfig()) -> TreeboostModel:
    """Stochastic gradient boosting of shallow trees under Huber loss.

    Each round: residuals against the current fit are clipped at delta (the
    huber_quantile of their magnitudes) to form pseudo-residuals; the
    influence_trimming fraction of rows with the smallest pseudo-residual
    magnitudes is dropped; a stochastic_fraction subsample of the remainder
    grows a depth-bounded tree; leaf values are robust Huber location steps of
    the in-leaf residuals.  Predictions accumulate shrinkage-scaled tree
    outputs on top of the median starting value f0.
    """
    if len(train) < 10:
        raise ValueError(f"need at least 10 training projects, got {len(train)}")
    x = feature_matrix(train)
    y = effort_vector(train)
    f0 = float(np.median(y))
    model = TreeboostModel(f0, config.shrinkage)
    if float(np.ptp(y)) == 0.0:
        return model
    current = np.full(len(y), f0)
    rng = np.random.default_rng(config.seed)
    for _ in range(config.n_trees):
        diff = y - current
        abs_diff = np.abs(diff)
        if float(abs_diff.max()) == 0.0:
            break
        delta = float(np.quantile(abs_diff, config.huber_quantile))
        pseudo = np.where(abs_diff <= delta, diff, delta * np.sign(diff))
        keep = np.arange(len(y))
        trim = int(config.influence_trimming * len(y))
        if trim > 0:
            keep = np.argsort(np.abs(pseudo), kind="stable")[trim:]
            keep.sort()
        size = max(1, int(config.stochastic_fraction * len(keep)))
        sub = rng.choice(keep, size=size, replace=False)
        sub.sort()
        tree = _grow_stage_tree(x[sub], pseudo[sub], config.max_depth)
        leaves = _leaf_ids(tree, x[sub])
        regions: dict[int, list[int]] = {}
        for i, leaf in enumerate(leaves):
            regions.setdefault(id(leaf), []).append(i)
        for rows in regions.values():
            leaves[rows[0]].value = _stage_leaf_value(diff[sub][rows], delta)
        model.trees.append(tree)
        current = current + config.shrinkage * _apply_stage(tree, x)
        post_delta = float(np.quantile(np.abs(y - current), config.huber_quantile))
        model.loss_trace.append(huber_loss(y, current, post_delta))
    return model


def predict_treeboost(model: TreeboostModel, project: Project) -> float:
    row = np.asarray(project.features(), dtype=float)
    total = model.f0 + model.shrinkage * sum(
        _leaf_of(tree, row).value for tree in model.trees
    )
    return max(float(total), EFFORT_FLOOR_PH)


def predict_treeboost_dataset(model: TreeboostModel, dataset: Dataset) -> np.ndarray:
    return np.array([predict_treeboost(model, p) for p in dataset])


def _boost_node_to_json(node: BoostNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _boost_node_to_json(node.left),
        "right": _boost_node_to_json(node.right),
    }


def _boost_node_from_json(doc: dict) -> BoostNode:
    if "feature" not in doc:
        return BoostNode(value=float(doc["value"]))
    return BoostNode(
        0.0,
        int(doc["feature"]),
        float(doc["threshold"]),
        _boost_node_from_json(doc["left"]),
        _boost_node_from_json(doc["right"]),
    )


def treeboost_to_json(model: TreeboostModel) -> dict:
    return {
        "kind": "treeboost",
        "f0": model.f0,
        "shrinkage": model.shrinkage,
        "trees": [_boost_node_to_json(t) for t in model.trees],
    }


def treeboost_from_json(doc: dict) -> TreeboostModel:
    if doc.get("kind") != "treeboost":
        raise ValueError(f"expected model kind 'treeboost', got {doc.get('kind')!r}")
    return TreeboostModel(
        float(doc["f0"]),
        float(doc["shrinkage"]),
        [_boost_node_from_json(t) for t in doc["trees"]],
    )


@dataclass
class MlrModel:
    """Log-space linear regression with collinearity and significance diagnostics."""

    intercept: float
    coef_ln_size: float
    coef_productivity: float
    coef_complexity: float
    adjusted_r2: float
    vif: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Return (beta, R^2); raises on rank deficiency."""
    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        raise ValueError("collinear design: predictors are linearly dependent")
    residuals = y - x @ beta
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if tss == 0.0 else 1.0 - float(np.sum(residuals**2)) / tss
    return beta, r2


def fit_mlr(train: Dataset) -> MlrModel:
    """Fit ln(effort) on [1, ln(size), productivity, complexity] by OLS."""
    if len(train) < 5:
        raise ValueError(f"need at least 5 training projects, got {len(train)}")
    features = feature_matrix(train)
    y = np.log(effort_vector(train))
    n = len(y)
    x = np.column_stack(
        [np.ones(n), np.log(features[:, 0]), features[:, 1], features[:, 2]]
    )
    beta, r2 = _ols(x, y)
    p = x.shape[1] - 1
    adjusted_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)

    residuals = y - x @ beta
    dof = n - x.shape[1]
    sigma2 = float(np.sum(residuals**2)) / dof
    covariance = sigma2 * np.linalg.inv(x.T @ x)
    se = np.sqrt(np.diag(covariance))
    t_all = beta / se
    names = ("intercept",) + MLR_PREDICTORS
    t_stats = {name: float(t_all[i]) for i, name in enumerate(names)}
    p_values = {
        name: float(2.0 * stats.t.sf(abs(t_all[i]), dof)) for i, name in enumerate(names)
    }

    vif: dict[str, float] = {}
    for i, name in enumerate(MLR_PREDICTORS, start=1):
        others = [j for j in range(1, x.shape[1]) if j != i]
        aux = np.column_stack([np.ones(n)] + [x[:, j] for j in others])
        _, aux_r2 = _ols(aux, x[:, i])
        vif[name] = float("inf") if aux_r2 >= 1.0 else 1.0 / (1.0 - aux_r2)

    return MlrModel(
        float(beta[0]),
        float(beta[1]),
        float(beta[2]),
        float(beta[3]),
        float(adjusted_r2),
        vif,
        t_stats,
        p_values,
    )


def predict_mlr(model: MlrModel, project: Project) -> float:
    """exp of the log-space score; positive by construction."""
    score = (
        model.intercept
        + model.coef_ln_size * math.log(project.size_ucp)
        + model.coef_productivity * project.productivity
        + model.coef_complexity * project.complexity
    )
    return math.exp(score)


def predict_mlr_dataset(model: MlrModel, dataset: Dataset) -> np.ndarray:
    return np.array([predict_mlr(model, p) for p in dataset])


def mlr_to_json(model: MlrModel, alpha: float = 0.05) -> dict:
    return {
        "kind": "mlr",
        "coefficients": {
            "intercept": model.intercept,
            "ln_size": model.coef_ln_size,
            "productivity": model.coef_productivity,
            "complexity": model.coef_complexity,
        },
        "diagnostics": {
            "adjusted_r2": model.adjusted_r2,
            "vif": dict(model.vif),
            "vif_alarm_threshold": VIF_ALARM,
            "vif_alarms": {k: v > VIF_ALARM for k, v in model.vif.items()},
            "t_stats": dict(model.t_stats),
            "p_values": dict(model.p_values),
            "alpha": alpha,
            "significant": {k: v <= alpha for k, v in model.p_values.items()},
        },
    }


def mlr_from_json(doc: dict) -> MlrModel:
    if doc.get("kind") != "mlr":
        raise ValueError(f"expected model kind 'mlr', got {doc.get('kind')!r}")
    coef = doc["coefficients"]
    diag = doc["diagnostics"]
    return MlrModel(
        float(coef["intercept"]),
        float(coef["ln_size"]),
        float(coef["productivity"]),
        float(coef["complexity"]),
        float(diag["adjusted_r2"]),
        {k: float(v) for k, v in diag["vif"].items()},
        {k: float(v) for k, v in diag["t_stats"].items()},
        {k: float(v) for k, v in diag["p_values"].items()},
    )

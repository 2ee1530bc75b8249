"""Fuzzy c-means clustering and the Gaussian fuzzy inference model built from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SIGMA_FLOOR_SCALE = 1e-6


@dataclass(frozen=True)
class FcmConfig:
    """Knobs for fuzzy c-means.

    k: number of clusters (k=1 degenerates to a single all-ones partition).
    fuzzifier_m: membership exponent, strictly greater than 1.
    tolerance: stop once the largest membership change falls below it.
    """

    k: int = 3
    fuzzifier_m: float = 2.0
    tolerance: float = 1e-6
    max_iterations: int = 300
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if not self.fuzzifier_m > 1.0:
            raise ValueError(f"fuzzifier_m must exceed 1, got {self.fuzzifier_m}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")


@dataclass
class FuzzyPartition:
    """FCM output: cluster centers, membership matrix, objective history."""

    centers: np.ndarray  # (k, d)
    memberships: np.ndarray  # (n, k), rows sum to 1
    objective_trace: list[float]
    fuzzifier_m: float


@dataclass
class Standardization:
    """Per-feature z-score parameters learned on training data."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardization":
        x = np.asarray(features, dtype=float)
        sd = x.std(axis=0)
        return cls(x.mean(axis=0), np.where(sd > 0, sd, 1.0))

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.mean) / self.scale

    def to_json(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "Standardization":
        return cls(np.asarray(doc["mean"], dtype=float), np.asarray(doc["scale"], dtype=float))


@dataclass
class FuzzyInferenceModel:
    """One Gaussian membership function per (feature, cluster) pair.

    centers and sigmas are (d, k) arrays in the model's own feature space; if a
    standardization is attached, inputs are z-scored with it before evaluation.
    """

    centers: np.ndarray
    sigmas: np.ndarray
    standardization: Standardization | None = None

    @property
    def feature_count(self) -> int:
        return self.centers.shape[0]

    @property
    def cluster_count(self) -> int:
        return self.centers.shape[1]

    def to_json(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "sigmas": self.sigmas.tolist(),
            "standardization": None
            if self.standardization is None
            else self.standardization.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FuzzyInferenceModel":
        std = doc.get("standardization")
        return cls(
            np.asarray(doc["centers"], dtype=float),
            np.asarray(doc["sigmas"], dtype=float),
            None if std is None else Standardization.from_json(std),
        )


def _as_feature_matrix(features: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"features must be a 2-D matrix, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    return x


def _memberships_from_sqdist(d2: np.ndarray, fuzzifier_m: float) -> np.ndarray:
    u = np.empty_like(d2)
    zero_rows = d2.min(axis=1) == 0.0
    if np.any(zero_rows):
        # A point sitting exactly on a center gets full membership there.
        u[zero_rows] = 0.0
        rows = np.nonzero(zero_rows)[0]
        u[rows, np.argmax(d2[rows] == 0.0, axis=1)] = 1.0
    regular = ~zero_rows
    if np.any(regular):
        d2r = d2[regular]
        ratio = d2r / d2r.min(axis=1, keepdims=True)
        w = ratio ** (-1.0 / (fuzzifier_m - 1.0))
        u[regular] = w / w.sum(axis=1, keepdims=True)
    return u


def fcm_cluster(features: np.ndarray, config: FcmConfig = FcmConfig()) -> FuzzyPartition:
    """Cluster rows of `features` with Bezdek's fuzzy c-means.

    Memberships are initialized from a seeded uniform draw (rows normalized),
    then centers and memberships alternate until the largest membership change
    drops below `config.tolerance` or `config.max_iterations` is hit.  The
    recorded objective J_m = sum_i sum_c u_ic^m ||x_i - v_c||^2 is
    non-increasing across iterations.
    """
    x = _as_feature_matrix(features)
    n, d = x.shape
    if n < config.k:
        raise ValueError(f"need at least k={config.k} points, got {n}")
    if config.k >= 2 and bool(np.all(x == x[0])):
        raise ValueError("degenerate geometry: all points identical")

    rng = np.random.default_rng(config.seed)
    u = rng.random((n, config.k))
    u /= u.sum(axis=1, keepdims=True)

    centers = np.zeros((config.k, d))
    trace: list[float] = []
    for _ in range(config.max_iterations):
        um = u ** config.fuzzifier_m
        weights = um.sum(axis=0)
        fresh = weights > 0
        centers[fresh] = (um.T[fresh] @ x) / weights[fresh, None]
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        u_next = _memberships_from_sqdist(d2, config.fuzzifier_m)
        trace.append(float((u_next ** config.fuzzifier_m * d2).sum()))
        shift = float(np.abs(u_next - u).max())
        u = u_next
        if shift < config.tolerance:
            break
    return FuzzyPartition(centers.copy(), u, trace, config.fuzzifier_m)


def build_fuzzy_model(
    partition: FuzzyPartition,
    features: np.ndarray,
    standardization: Standardization | None = None,
) -> FuzzyInferenceModel:
    """Derive Gaussian membership functions from an FCM partition.

    Per (feature j, cluster c): the Gaussian center is the cluster center's
    j-th coordinate and the width is the membership-weighted standard
    deviation sqrt(sum_i u_ic^m (x_ij - c_jc)^2 / sum_i u_ic^m), floored at
    1e-6 of the feature's range so no function collapses to a spike.
    """
    x = _as_feature_matrix(features)
    n, d = x.shape
    if partition.memberships.shape[0] != n or partition.centers.shape[1] != d:
        raise ValueError("dimension mismatch between partition and features")
    um = partition.memberships ** partition.fuzzifier_m
    centers = partition.centers.T.copy()  # (d, k)
    dev2 = (x[:, :, None] - centers[None, :, :]) ** 2
    var = np.einsum("ic,ijc->jc", um, dev2) / um.sum(axis=0)[None, :]
    ranges = x.max(axis=0) - x.min(axis=0)
    floor = np.where(ranges > 0, _SIGMA_FLOOR_SCALE * ranges, _SIGMA_FLOOR_SCALE)
    sigmas = np.maximum(np.sqrt(var), floor[:, None])
    return FuzzyInferenceModel(centers, sigmas, standardization)


def membership_matrix(model: FuzzyInferenceModel, features: np.ndarray) -> np.ndarray:
    """Evaluate all Gaussian functions on each row.

    Returns an (m, d*k) matrix, columns ordered feature-major: all clusters of
    feature 0, then all clusters of feature 1, and so on.
    """
    x = _as_feature_matrix(features)
    if x.shape[1] != model.feature_count:
        raise ValueError(
            f"dimension mismatch: model expects {model.feature_count} features, got {x.shape[1]}"
        )
    if model.standardization is not None:
        x = model.standardization.apply(x)
    z = (x[:, :, None] - model.centers[None, :, :]) / model.sigmas[None, :, :]
    values = np.exp(-0.5 * z * z)
    return values.reshape(x.shape[0], model.feature_count * model.cluster_count)

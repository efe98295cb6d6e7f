"""Information estimators: linear-Gaussian, k-nearest-neighbor, plug-in."""

from .base import Estimator, InfoValue, as_columns
from .discrete import (
    DEFAULT_STATE_CAP,
    DiscreteEstimator,
    JointCounts,
    counts_from_columns,
    plugin_cmi,
    plugin_entropy,
)
from .gaussian import GaussianEstimator, gaussian_cmi, gaussian_cmi_batch, gaussian_mi
from .knn import KnnEstimator, KnnSettings, knn_cmi, knn_mi

__all__ = [
    "DEFAULT_STATE_CAP",
    "DiscreteEstimator",
    "Estimator",
    "GaussianEstimator",
    "InfoValue",
    "JointCounts",
    "KnnEstimator",
    "KnnSettings",
    "as_columns",
    "counts_from_columns",
    "gaussian_cmi",
    "gaussian_cmi_batch",
    "gaussian_mi",
    "knn_cmi",
    "knn_mi",
    "plugin_cmi",
    "plugin_entropy",
]

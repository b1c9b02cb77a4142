from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DatasetError


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix plus dense class indices.

    ``class_labels[k]`` is the original label text of class ``k`` (first-appearance
    order at load time). Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    feature_names: Optional[Tuple[str, ...]] = None
    class_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)

        if features.ndim != 2:
            raise DatasetError(f"features must be a 2-D matrix, got shape {features.shape}")
        n_rows, n_cols = features.shape
        if n_rows < 1:
            raise DatasetError("dataset is empty")
        if n_cols < 1:
            raise DatasetError("dataset has no feature columns")
        if labels.shape != (n_rows,):
            raise DatasetError(f"expected {n_rows} labels, got shape {labels.shape}")
        if not np.all(np.isfinite(features)):
            row, col = np.argwhere(~np.isfinite(features))[0]
            raise DatasetError(f"non-finite feature value at row {row}, column {col}")
        if self.class_count < 1:
            raise DatasetError(f"class_count must be >= 1, got {self.class_count}")
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise DatasetError(f"labels must lie in [0, {self.class_count})")
        if self.feature_names is not None and len(self.feature_names) != n_cols:
            raise DatasetError(f"expected {n_cols} feature names, got {len(self.feature_names)}")
        if self.class_labels is not None and len(self.class_labels) != self.class_count:
            raise DatasetError(f"expected {self.class_count} class labels, got {len(self.class_labels)}")

        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))
        if self.class_labels is not None:
            object.__setattr__(self, "class_labels", tuple(str(n) for n in self.class_labels))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def is_single_class(self) -> bool:
        return self.class_count < 2

    def label_names(self) -> Tuple[str, ...]:
        """Original class names, falling back to the class index as text."""
        if self.class_labels is not None:
            return self.class_labels
        return tuple(str(k) for k in range(self.class_count))

    def column_names(self) -> Tuple[str, ...]:
        if self.feature_names is not None:
            return self.feature_names
        return tuple(f"x{j}" for j in range(self.n_features))

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            class_count=self.class_count,
            feature_names=self.feature_names,
            class_labels=self.class_labels,
        )


@dataclass(frozen=True)
class SplitPair:
    """Disjoint train/test partition of a source dataset, with the row indices used."""

    train: Dataset
    test: Dataset
    seed: int
    train_indices: np.ndarray = field(repr=False)
    test_indices: np.ndarray = field(repr=False)

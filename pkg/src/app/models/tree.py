from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import DatasetError, ModelFormatError, SchemaMismatchError

# feature index stored for leaves in the flat node arrays
LEAF = -1

# A class distribution is a length-K float64 vector summing to one.
ClassDistribution = np.ndarray


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 10
    min_samples_split: int = 2
    max_features: Optional[int] = None

    def resolve_max_features(self, n_features: int) -> int:
        if self.max_features is None:
            return int(np.ceil(np.sqrt(n_features)))
        return max(1, min(int(self.max_features), n_features))


def check_query(x: np.ndarray, n_features: int) -> np.ndarray:
    """Return ``x`` as a float matrix (rows = instances) after arity and finiteness checks."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != n_features:
        raise SchemaMismatchError(
            f"expected {n_features} feature values per instance, got shape {np.shape(x)}"
        )
    if not np.all(np.isfinite(arr)):
        raise DatasetError("query contains NaN or infinite feature values")
    return arr


class DecisionTree:
    """Axis-aligned binary tree whose leaves keep raw per-class training counts.

    Nodes are stored in flat arrays in pre-order; node 0 is the root. An instance
    goes left iff ``x[feature] <= threshold``.
    """

    def __init__(
        self,
        feature: np.ndarray,
        threshold: np.ndarray,
        left: np.ndarray,
        right: np.ndarray,
        counts: np.ndarray,
        n_features: int,
        class_count: int,
    ):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64).reshape(len(self.feature), class_count)
        self.n_features = int(n_features)
        self.class_count = int(class_count)
        for arr in (self.feature, self.threshold, self.left, self.right, self.counts):
            arr.setflags(write=False)
        self.depth = self._compute_depth()

    # Routing --------------------------------------------------------------------
    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf reached by every row of ``X``."""
        X = check_query(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while np.any(active):
            r = rows[active]
            current = node[r]
            go_left = X[r, self.feature[current]] <= self.threshold[current]
            node[r] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return node

    def leaf_counts(self, x: np.ndarray) -> Tuple[np.ndarray, int]:
        """Per-class counts and total of the leaf containing the single instance ``x``."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim != 1:
            raise SchemaMismatchError(f"expected a single feature vector, got shape {arr.shape}")
        leaf = self.apply(arr)[0]
        counts = self.counts[leaf].copy()
        return counts, int(counts.sum())

    def leaf_counts_batch(self, X: np.ndarray) -> np.ndarray:
        return self.counts[self.apply(X)]

    def predict_proba(self, x: np.ndarray) -> ClassDistribution:
        """Laplace-corrected class distribution of the leaf containing ``x``."""
        counts, total = self.leaf_counts(x)
        return (counts + 1.0) / (total + self.class_count)

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        counts = self.leaf_counts_batch(X).astype(np.float64)
        return (counts + 1.0) / (counts.sum(axis=1, keepdims=True) + self.class_count)

    # Structure ------------------------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def leaf_totals(self) -> np.ndarray:
        return self.counts[self.feature == LEAF].sum(axis=1)

    def _compute_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        # pre-order: children always follow their parent
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return int(depth.max()) if self.n_nodes else 0

    # Serialization --------------------------------------------------------------
    def to_dict(self) -> Dict[str, Any]:
        """Nested node tree with keys feature/threshold/left/right or counts."""

        def node_dict(node: int) -> Dict[str, Any]:
            if self.feature[node] == LEAF:
                return {"counts": [int(c) for c in self.counts[node]]}
            return {
                "feature": int(self.feature[node]),
                "threshold": float(self.threshold[node]),
                "left": node_dict(int(self.left[node])),
                "right": node_dict(int(self.right[node])),
            }

        return node_dict(0)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], n_features: int, class_count: int) -> "DecisionTree":
        feature: List[int] = []
        threshold: List[float] = []
        left: List[int] = []
        right: List[int] = []
        counts: List[List[int]] = []

        def visit(node: Dict[str, Any]) -> int:
            index = len(feature)
            if "counts" in node:
                values = [int(c) for c in node["counts"]]
                if len(values) != class_count or min(values) < 0:
                    raise ModelFormatError(f"leaf counts {values} do not match {class_count} classes")
                feature.append(LEAF)
                threshold.append(0.0)
                left.append(LEAF)
                right.append(LEAF)
                counts.append(values)
                return index
            try:
                split_feature = int(node["feature"])
                split_threshold = float(node["threshold"])
                left_node, right_node = node["left"], node["right"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ModelFormatError(f"malformed tree node: {exc}") from exc
            if not 0 <= split_feature < n_features:
                raise ModelFormatError(f"split feature {split_feature} outside [0, {n_features})")
            feature.append(split_feature)
            threshold.append(split_threshold)
            left.append(LEAF)
            right.append(LEAF)
            counts.append([0] * class_count)
            left[index] = visit(left_node)
            right[index] = visit(right_node)
            # internal nodes carry the sum of their subtree
            counts[index] = [a + b for a, b in zip(counts[left[index]], counts[right[index]])]
            return index

        if not isinstance(payload, dict):
            raise ModelFormatError("tree payload must be a JSON object")
        visit(payload)
        return cls(feature, threshold, left, right, counts, n_features, class_count)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return (
            self.n_features == other.n_features
            and self.class_count == other.class_count
            and np.array_equal(self.feature, other.feature)
            and np.array_equal(self.threshold, other.threshold)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None  # type: ignore[assignment]

"""Greedy top-down induction of Gini decision trees."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from app.models.dataset import Dataset
from app.models.errors import DatasetError
from app.models.tree import LEAF, DecisionTree, TreeConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    impurity: float


def gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    share = counts / total
    return float(1.0 - np.sum(share * share))


class TreeBuilder:
    """Grows one tree from a (possibly bootstrapped) sample.

    At every node a random subset of ``ceil(sqrt(D))`` non-constant features is
    examined; thresholds are midpoints between consecutive distinct values and the
    split with the lowest weighted Gini impurity wins (ties: lowest feature index,
    then lowest threshold). Growth stops at ``max_depth``, on pure nodes, and on
    nodes with fewer than ``min_samples_split`` instances.
    """

    def __init__(self, config: TreeConfig, class_count: int):
        if config.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {config.max_depth}")
        if config.min_samples_split < 2:
            raise ValueError(f"min_samples_split must be >= 2, got {config.min_samples_split}")
        self.config = config
        self.class_count = class_count

    def build(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> DecisionTree:
        if len(y) == 0:
            raise DatasetError("cannot grow a tree from an empty sample")
        self._X = X
        self._y = y
        self._rng = rng
        self._n_candidates = self.config.resolve_max_features(X.shape[1])
        self._feature: List[int] = []
        self._threshold: List[float] = []
        self._left: List[int] = []
        self._right: List[int] = []
        self._counts: List[np.ndarray] = []

        self._grow(np.arange(len(y)), depth=0)
        tree = DecisionTree(
            self._feature, self._threshold, self._left, self._right,
            np.array(self._counts), X.shape[1], self.class_count,
        )
        logger.debug("grew tree: %d nodes, %d leaves, depth %d", tree.n_nodes, tree.n_leaves, tree.depth)
        return tree

    def _grow(self, rows: np.ndarray, depth: int) -> int:
        counts = np.bincount(self._y[rows], minlength=self.class_count)
        node = len(self._feature)
        self._feature.append(LEAF)
        self._threshold.append(0.0)
        self._left.append(LEAF)
        self._right.append(LEAF)
        self._counts.append(counts)

        if depth >= self.config.max_depth or len(rows) < self.config.min_samples_split:
            return node
        if np.count_nonzero(counts) <= 1:
            return node

        split = self._best_split(rows, gini(counts))
        if split is None:
            return node

        goes_left = self._X[rows, split.feature] <= split.threshold
        self._feature[node] = split.feature
        self._threshold[node] = split.threshold
        self._left[node] = self._grow(rows[goes_left], depth + 1)
        self._right[node] = self._grow(rows[~goes_left], depth + 1)
        return node

    def _candidate_features(self, rows: np.ndarray) -> List[int]:
        chosen = []
        for feature in self._rng.permutation(self._X.shape[1]):
            column = self._X[rows, feature]
            if column.min() < column.max():
                chosen.append(int(feature))
                if len(chosen) == self._n_candidates:
                    break
        return sorted(chosen)

    def _best_split(self, rows: np.ndarray, parent_impurity: float) -> Optional[SplitCandidate]:
        best: Optional[SplitCandidate] = None
        labels = self._y[rows]
        one_hot = np.eye(self.class_count, dtype=np.float64)[labels]
        n = float(len(rows))

        for feature in self._candidate_features(rows):
            values = self._X[rows, feature]
            order = np.argsort(values, kind="stable")
            sorted_values = values[order]
            left_counts = np.cumsum(one_hot[order], axis=0)[:-1]
            total_counts = left_counts[-1] + one_hot[order[-1]]
            right_counts = total_counts - left_counts

            boundary = np.flatnonzero(sorted_values[:-1] < sorted_values[1:])
            if boundary.size == 0:
                continue
            n_left = boundary + 1.0
            n_right = n - n_left
            purity = (
                np.sum(left_counts[boundary] ** 2, axis=1) / n_left
                + np.sum(right_counts[boundary] ** 2, axis=1) / n_right
            )
            impurity = 1.0 - purity / n
            # first minimum = lowest threshold for this feature
            pos = int(np.argmin(impurity))
            if best is None or impurity[pos] < best.impurity:
                lower = sorted_values[boundary[pos]]
                upper = sorted_values[boundary[pos] + 1]
                threshold = (lower + upper) / 2.0
                if threshold >= upper:
                    threshold = lower
                best = SplitCandidate(feature, float(threshold), float(impurity[pos]))

        if best is None or best.impurity > parent_impurity + 1e-12:
            return None
        return best


def fit_tree(train: Dataset, config: TreeConfig, rng: np.random.Generator) -> DecisionTree:
    """Grow a single tree on all rows of ``train``."""
    return TreeBuilder(config, train.class_count).build(train.features, train.labels, rng)

"""Bootstrapped forest training.

Every tree draws from its own Philox stream keyed by ``(seed, tree_index)``, so the
result does not depend on the number of workers or their scheduling.
"""
from __future__ import annotations

import logging

import numpy as np
from joblib import Parallel, delayed

from app.models.dataset import Dataset
from app.models.errors import DatasetError
from app.models.forest import Forest, ForestConfig
from app.models.tree import DecisionTree, TreeConfig

from .tree_builder import TreeBuilder

logger = logging.getLogger(__name__)


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(tree_index)])))


def _fit_bootstrapped_tree(X: np.ndarray, y: np.ndarray, class_count: int,
                           config: TreeConfig, seed: int, tree_index: int) -> DecisionTree:
    rng = tree_rng(seed, tree_index)
    rows = rng.integers(0, len(y), size=len(y))
    return TreeBuilder(config, class_count).build(X[rows], y[rows], rng)


def fit_forest(train: Dataset, config: ForestConfig, n_jobs: int = 1) -> Forest:
    """Fit ``config.n_trees`` trees, each on a size-N bootstrap sample of ``train``."""
    if config.n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {config.n_trees}")
    if train.is_single_class:
        raise DatasetError("training data must contain at least two classes")

    tree_config = config.tree_config()
    # n_jobs=1 runs in-process, in tree order
    trees = Parallel(n_jobs=n_jobs)(
        delayed(_fit_bootstrapped_tree)(train.features, train.labels, train.class_count,
                                        tree_config, config.seed, i)
        for i in range(config.n_trees)
    )

    forest = Forest(
        trees=trees,
        config=config,
        class_count=train.class_count,
        n_features=train.n_features,
        class_labels=train.label_names(),
        feature_names=train.feature_names,
    )
    logger.debug("fitted forest of %d trees on %d rows (seed %d)", forest.n_trees, train.n_samples, config.seed)
    return forest

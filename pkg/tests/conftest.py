"""Pytest configuration and shared fixtures."""
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Qt renders SVGs without a display
os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))


@pytest.fixture
def binary_csv(tmp_path):
    """Small labelled CSV with a header and two string classes."""
    path = tmp_path / "binary.csv"
    path.write_text(
        "f1,f2,label\n"
        "0.0,1.0,no\n"
        "0.5,1.5,no\n"
        "1.0,0.5,no\n"
        "3.0,3.5,yes\n"
        "3.5,3.0,yes\n"
        "4.0,4.5,yes\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def headerless_csv(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("1.0,2.0,a\n3.0,4.0,b\n", encoding="utf-8")
    return path


@pytest.fixture
def tiny_dataset():
    """1-D dataset {(0, class 0), (1, class 1)}."""
    from app.models.dataset import Dataset

    return Dataset(features=np.array([[0.0], [1.0]]), labels=np.array([0, 1]), class_count=2)


@pytest.fixture
def gaussian_dataset():
    """200-row two-Gaussian binary problem with label noise in the overlap."""
    from app.services.synthetic import make_gaussian_dataset

    return make_gaussian_dataset(n=200, label_noise=0.2, seed=3)


@pytest.fixture
def ternary_dataset():
    """Three well separated classes along x0, 90 rows."""
    from app.models.dataset import Dataset

    rng = np.random.default_rng(11)
    labels = np.repeat([0, 1, 2], 30)
    features = np.column_stack([labels * 4.0 + rng.normal(0, 0.5, 90), rng.normal(0, 1, 90)])
    return Dataset(
        features=features,
        labels=labels,
        class_count=3,
        feature_names=("x0", "x1"),
        class_labels=("red", "green", "blue"),
    )


@pytest.fixture
def small_config():
    from app.models.forest import ForestConfig

    return ForestConfig(n_trees=5, max_depth=4, seed=1)


@pytest.fixture
def small_forest(gaussian_dataset, small_config):
    from app.services.forest_builder import fit_forest

    return fit_forest(gaussian_dataset, small_config)


@pytest.fixture
def ternary_forest(ternary_dataset, small_config):
    from app.services.forest_builder import fit_forest

    return fit_forest(ternary_dataset, small_config)


@pytest.fixture
def leaf_tree():
    """Build single-leaf trees with given counts."""
    from app.models.tree import LEAF, DecisionTree

    def make(counts, n_features=2):
        return DecisionTree([LEAF], [0.0], [LEAF], [LEAF], [list(counts)], n_features, len(counts))

    return make


@pytest.fixture
def leaf_forest(leaf_tree):
    """Build forests whose trees are single leaves with the given counts."""
    from app.models.forest import Forest, ForestConfig

    def make(*leaf_counts, n_features=2):
        trees = [leaf_tree(c, n_features) for c in leaf_counts]
        return Forest(trees, ForestConfig(n_trees=len(trees), max_depth=0), len(leaf_counts[0]), n_features)

    return make

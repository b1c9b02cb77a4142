from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ModelFormatError
from .tree import ClassDistribution, DecisionTree, TreeConfig, check_query


@dataclass(frozen=True)
class ForestConfig:
    """Training setup. The defaults are 50 trees of depth at most 10 on a 70/30 split."""

    n_trees: int = 50
    max_depth: int = 10
    train_fraction: float = 0.7
    stratify: bool = False
    min_samples_split: int = 2
    max_features: Optional[int] = None
    seed: int = 0

    def tree_config(self) -> TreeConfig:
        return TreeConfig(
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            max_features=self.max_features,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ForestConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in payload.items() if k in known})


class Forest:
    """Bootstrapped ensemble of probabilistic decision trees."""

    def __init__(
        self,
        trees: Sequence[DecisionTree],
        config: ForestConfig,
        class_count: int,
        n_features: int,
        class_labels: Optional[Sequence[str]] = None,
        feature_names: Optional[Sequence[str]] = None,
    ):
        if not trees:
            raise ModelFormatError("a forest needs at least one tree")
        for tree in trees:
            if tree.class_count != class_count or tree.n_features != n_features:
                raise ModelFormatError("all trees must share the forest's class count and arity")
        self.trees: Tuple[DecisionTree, ...] = tuple(trees)
        self.config = config
        self.class_count = int(class_count)
        self.n_features = int(n_features)
        self.class_labels = tuple(class_labels) if class_labels is not None else tuple(
            str(k) for k in range(self.class_count)
        )
        self.feature_names = tuple(feature_names) if feature_names is not None else None

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict_proba_all(self, x: np.ndarray) -> List[ClassDistribution]:
        """One Laplace-corrected distribution per tree for the single instance ``x``."""
        arr = np.asarray(x, dtype=np.float64)
        check_query(arr, self.n_features)
        return [tree.predict_proba(arr) for tree in self.trees]

    def predict_proba_all_batch(self, X: np.ndarray) -> np.ndarray:
        """Array of shape (M, N, K) with every tree's distribution for every row."""
        X = check_query(X, self.n_features)
        return np.stack([tree.predict_proba_batch(X) for tree in self.trees])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean distribution over the trees, shape (N, K)."""
        return self.predict_proba_all_batch(X).mean(axis=0)

    def predict(self, x: np.ndarray) -> int:
        """Soft-vote class for a single instance; ties go to the lowest class index."""
        mean = np.mean(self.predict_proba_all(x), axis=0)
        return int(np.argmax(mean))

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def depth_stats(self) -> Tuple[int, float, int]:
        depths = [tree.depth for tree in self.trees]
        return min(depths), float(np.mean(depths)), max(depths)

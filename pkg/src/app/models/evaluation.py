from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

ENTROPY_CRITERIA = ("au_ent", "eu_ent", "tu_ent")
LIKELIHOOD_CRITERIA = ("au_rl", "eu_rl")
BASELINE_CRITERIA = ("random", "oracle")
ALL_CRITERIA = ENTROPY_CRITERIA + LIKELIHOOD_CRITERIA + BASELINE_CRITERIA
DEFAULT_CRITERIA = ENTROPY_CRITERIA + LIKELIHOOD_CRITERIA + ("random",)


@dataclass(frozen=True)
class ScoredPrediction:
    """One test instance: prediction, truth and its uncertainty degrees.

    The relative-likelihood fields are ``None`` for non-binary tasks.
    """

    instance_index: int
    predicted: int
    actual: int
    au_ent: float
    eu_ent: float
    tu_ent: float
    au_rl: Optional[float] = None
    eu_rl: Optional[float] = None

    @property
    def correct(self) -> bool:
        return self.predicted == self.actual

    def score(self, criterion: str) -> float:
        if criterion == "oracle":
            return 0.0 if self.correct else 1.0
        value = getattr(self, criterion)
        if value is None:
            raise ValueError(f"criterion {criterion!r} is not available for this record")
        return float(value)


@dataclass(frozen=True)
class AccuracyRejectionCurve:
    criterion: str
    n_test: int
    rejection: np.ndarray
    accuracy: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float]]:
        return [(float(r), float(a)) for r, a in zip(self.rejection, self.accuracy)]


@dataclass(frozen=True)
class CurveSummary:
    """Point-wise mean and spread of one criterion's curves over the repetitions."""

    criterion: str
    rejection: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_repetitions: int

    @property
    def stderr(self) -> np.ndarray:
        return self.std / np.sqrt(self.n_repetitions)


@dataclass(frozen=True)
class ExperimentResult:
    curves: Dict[str, CurveSummary]
    n_repetitions: int
    n_test: int
    seed: int
    mean_accuracy: float

    def criteria(self) -> Tuple[str, ...]:
        return tuple(self.curves)

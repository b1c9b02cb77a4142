"""Experimental protocol: scoring, accuracy-rejection curves and repeated splits."""
from __future__ import annotations

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import spearmanr

from app.models.dataset import Dataset
from app.models.errors import DatasetError, SchemaMismatchError, UnsupportedTaskError
from app.models.evaluation import (
    ALL_CRITERIA,
    DEFAULT_CRITERIA,
    LIKELIHOOD_CRITERIA,
    AccuracyRejectionCurve,
    CurveSummary,
    ExperimentResult,
    ScoredPrediction,
)
from app.models.forest import Forest, ForestConfig

from .dataset_loader import split_dataset
from .entropy_uncertainty import entropy_uncertainty_batch
from .forest_builder import fit_forest
from .likelihood_uncertainty import DEFAULT_TOL, forest_rl_uncertainty_batch, shared_table

logger = logging.getLogger(__name__)

DEFAULT_STEP = 0.02


def score_test_set(forest: Forest, test: Dataset, tol: float = DEFAULT_TOL) -> List[ScoredPrediction]:
    """Prediction and uncertainty degrees for every test row (relative likelihood only if K = 2)."""
    if test.n_features != forest.n_features:
        raise SchemaMismatchError(f"model expects {forest.n_features} features, data has {test.n_features}")
    if test.class_count > forest.class_count:
        raise SchemaMismatchError(f"model knows {forest.class_count} classes, data has {test.class_count}")

    probs = forest.predict_proba_all_batch(test.features)
    predicted = np.argmax(probs.mean(axis=0), axis=1)
    total, aleatoric, epistemic = entropy_uncertainty_batch(probs)
    if forest.class_count == 2:
        eu_rl, au_rl = forest_rl_uncertainty_batch(forest, test.features, shared_table(tol))
    else:
        eu_rl = au_rl = None

    return [
        ScoredPrediction(
            instance_index=i,
            predicted=int(predicted[i]),
            actual=int(test.labels[i]),
            au_ent=float(aleatoric[i]),
            eu_ent=float(epistemic[i]),
            tu_ent=float(total[i]),
            au_rl=float(au_rl[i]) if au_rl is not None else None,
            eu_rl=float(eu_rl[i]) if eu_rl is not None else None,
        )
        for i in range(test.n_samples)
    ]


def rejection_grid(step: float = DEFAULT_STEP) -> np.ndarray:
    """Rejection fractions 0, step, 2*step, ... strictly below 1."""
    if not 0.0 < step < 1.0:
        raise ValueError(f"step must lie in (0, 1), got {step}")
    grid = []
    j = 0
    while True:
        r = round(j * step, 12)
        if r >= 1.0:
            break
        grid.append(r)
        j += 1
    return np.array(grid)


def rejection_order(records: Sequence[ScoredPrediction], criterion: str,
                    rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Positions of ``records`` from first to last rejected."""
    if criterion == "random":
        rng = rng or np.random.Generator(np.random.Philox(0))
        return rng.permutation(len(records))
    scores = np.array([r.score(criterion) for r in records])
    index = np.array([r.instance_index for r in records])
    # lexsort: last key is primary -> uncertainty descending, then instance index
    return np.lexsort((index, -scores))


def accuracy_rejection_curve(records: Sequence[ScoredPrediction], criterion: str,
                             step: float = DEFAULT_STEP, seed: int = 0) -> AccuracyRejectionCurve:
    """Accuracy on the retained records after rejecting the floor(r * n) most uncertain ones."""
    if not records:
        raise ValueError("cannot build an accuracy-rejection curve from no records")
    if criterion not in ALL_CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; choose from {', '.join(ALL_CRITERIA)}")
    if criterion in LIKELIHOOD_CRITERIA and getattr(records[0], criterion) is None:
        raise UnsupportedTaskError(f"criterion {criterion!r} is only available for binary tasks")

    n = len(records)
    order = rejection_order(records, criterion, np.random.Generator(np.random.Philox(np.random.SeedSequence(seed))))
    correct = np.array([rec.correct for rec in records], dtype=np.float64)[order]
    # correct_after[k] = number correct among positions k.. of the rejection order
    correct_after = np.concatenate([np.cumsum(correct[::-1])[::-1], [0.0]])

    rejection = rejection_grid(step)
    # at least one record is always retained
    rejected = np.minimum(np.floor(rejection * n + 1e-9).astype(np.int64), n - 1)
    accuracy = correct_after[rejected] / (n - rejected)
    return AccuracyRejectionCurve(criterion=criterion, n_test=n, rejection=rejection, accuracy=accuracy)


def resolve_criteria(criteria: Optional[Sequence[str]], class_count: int) -> Tuple[str, ...]:
    if criteria is None:
        if class_count == 2:
            return DEFAULT_CRITERIA
        return tuple(c for c in DEFAULT_CRITERIA if c not in LIKELIHOOD_CRITERIA)
    unknown = [c for c in criteria if c not in ALL_CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}; choose from {', '.join(ALL_CRITERIA)}")
    if class_count != 2 and any(c in LIKELIHOOD_CRITERIA for c in criteria):
        raise UnsupportedTaskError(
            f"relative-likelihood criteria need a binary dataset, this one has {class_count} classes"
        )
    return tuple(dict.fromkeys(criteria))


def repetition_seed(experiment_seed: int, repetition: int) -> int:
    state = np.random.SeedSequence([int(experiment_seed), int(repetition)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _run_repetition(dataset: Dataset, config: ForestConfig, criteria: Sequence[str],
                    step: float, tol: float, seed: int) -> Tuple[Dict[str, np.ndarray], float]:
    split = split_dataset(dataset, config.train_fraction, seed, config.stratify)
    forest = fit_forest(split.train, replace(config, seed=seed))
    records = score_test_set(forest, split.test, tol)
    curves = {c: accuracy_rejection_curve(records, c, step, seed).accuracy for c in criteria}
    accuracy = float(np.mean([r.correct for r in records]))
    logger.debug("repetition seed %d: accuracy %.4f", seed, accuracy)
    return curves, accuracy


def run_experiment(
    dataset: Dataset,
    config: ForestConfig,
    repetitions: int = 100,
    step: float = DEFAULT_STEP,
    criteria: Optional[Sequence[str]] = None,
    tol: float = DEFAULT_TOL,
    n_jobs: int = 1,
    repetition_seeds: Optional[Sequence[int]] = None,
) -> ExperimentResult:
    """Repeat split / fit / score / curves and average the curves point-wise.

    Repetition ``i`` uses a seed derived from ``(config.seed, i)`` for its split, its
    forest and its random-rejection baseline, unless ``repetition_seeds`` is given.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if dataset.n_samples < 2:
        raise DatasetError(f"dataset with {dataset.n_samples} row(s) is too small to split")
    chosen = resolve_criteria(criteria, dataset.class_count)
    if repetition_seeds is None:
        seeds = [repetition_seed(config.seed, i) for i in range(repetitions)]
    else:
        if len(repetition_seeds) != repetitions:
            raise ValueError("need exactly one seed per repetition")
        seeds = [int(s) for s in repetition_seeds]

    # fails on a too-small dataset before any fitting
    first_split = split_dataset(dataset, config.train_fraction, seeds[0], config.stratify)
    logger.info("running %d repetitions (%d trees, depth %d) on N=%d",
                repetitions, config.n_trees, config.max_depth, dataset.n_samples)

    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_run_repetition)(dataset, config, chosen, step, tol, seed) for seed in seeds
    )

    grid = rejection_grid(step)
    curves: Dict[str, CurveSummary] = {}
    for criterion in chosen:
        stacked = np.stack([curves_by_rep[criterion] for curves_by_rep, _ in outcomes])
        curves[criterion] = CurveSummary(
            criterion=criterion,
            rejection=grid,
            mean=stacked.mean(axis=0),
            std=stacked.std(axis=0),
            n_repetitions=repetitions,
        )
    return ExperimentResult(
        curves=curves,
        n_repetitions=repetitions,
        n_test=first_split.test.n_samples,
        seed=config.seed,
        mean_accuracy=float(np.mean([acc for _, acc in outcomes])),
    )


def compare_uncertainties(records: Sequence[ScoredPrediction]) -> Dict[str, float]:
    """Spearman correlation between the entropy and relative-likelihood estimates."""
    if not records:
        raise ValueError("no records to compare")
    if records[0].au_rl is None:
        raise UnsupportedTaskError("comparison needs relative-likelihood scores (binary task)")
    au_ent = [r.au_ent for r in records]
    eu_ent = [r.eu_ent for r in records]
    au_rl = [r.au_rl for r in records]
    eu_rl = [r.eu_rl for r in records]
    return {
        "aleatoric": float(spearmanr(au_ent, au_rl)[0]),
        "epistemic": float(spearmanr(eu_ent, eu_rl)[0]),
    }


def align_to_model(dataset: Dataset, forest: Forest) -> Dataset:
    """Re-index ``dataset``'s labels by name onto the model's class order."""
    if dataset.n_features != forest.n_features:
        raise SchemaMismatchError(f"model expects {forest.n_features} features, data has {dataset.n_features}")
    positions = {name: k for k, name in enumerate(forest.class_labels)}
    unknown = [name for name in dataset.label_names() if name not in positions]
    if unknown:
        raise SchemaMismatchError(f"labels {unknown} are not classes of the model {list(forest.class_labels)}")
    remap = np.array([positions[name] for name in dataset.label_names()], dtype=np.int64)
    return Dataset(
        features=dataset.features,
        labels=remap[dataset.labels],
        class_count=forest.class_count,
        feature_names=dataset.feature_names,
        class_labels=forest.class_labels,
    )

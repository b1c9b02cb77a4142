"""CSV reports written by the command-line subcommands."""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional, TextIO

import numpy as np
import pandas as pd

from app.models.evaluation import ExperimentResult
from app.models.forest import Forest

from .entropy_uncertainty import entropy_uncertainty_batch
from .likelihood_uncertainty import DEFAULT_TOL, UncertaintyTable, forest_rl_uncertainty_batch, shared_table

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
UNCERTAINTY_COLUMNS = ["index", "prediction", "au_ent", "eu_ent", "tu_ent", "au_rl", "eu_rl"]
CURVE_COLUMNS = ["criterion", "rejection_fraction", "mean_accuracy", "std_accuracy", "n_repetitions"]
TABLE_COLUMNS = ["n", "p", "pi_pos", "pi_neg", "u_e", "u_a"]


def uncertainty_frame(forest: Forest, X: np.ndarray, tol: float = DEFAULT_TOL) -> pd.DataFrame:
    """One row per query: predicted label plus the entropy and (binary only) likelihood degrees."""
    probs = forest.predict_proba_all_batch(X)
    predicted = np.argmax(probs.mean(axis=0), axis=1)
    total, aleatoric, epistemic = entropy_uncertainty_batch(probs)
    frame = pd.DataFrame({
        "index": np.arange(len(predicted)),
        "prediction": [forest.class_labels[k] for k in predicted],
        "au_ent": aleatoric,
        "eu_ent": epistemic,
        "tu_ent": total,
    })
    if forest.class_count == 2:
        eu_rl, au_rl = forest_rl_uncertainty_batch(forest, X, shared_table(tol))
        frame["au_rl"] = au_rl
        frame["eu_rl"] = eu_rl
    else:
        frame["au_rl"] = None
        frame["eu_rl"] = None
    return frame[UNCERTAINTY_COLUMNS]


def curves_frame(result: ExperimentResult) -> pd.DataFrame:
    parts = [
        pd.DataFrame({
            "criterion": summary.criterion,
            "rejection_fraction": summary.rejection,
            "mean_accuracy": summary.mean,
            "std_accuracy": summary.std,
            "n_repetitions": summary.n_repetitions,
        })
        for summary in result.curves.values()
    ]
    return pd.concat(parts, ignore_index=True)[CURVE_COLUMNS]


def table_frame(table: UncertaintyTable) -> pd.DataFrame:
    return pd.DataFrame(list(table.rows()), columns=TABLE_COLUMNS)


def write_frame(frame: pd.DataFrame, path: Optional[Path | str] = None, stream: Optional[TextIO] = None) -> Optional[Path]:
    """Write ``frame`` to ``path``, or to ``stream`` (stdout by default) when no path is given."""
    if path is None:
        frame.to_csv(stream or sys.stdout, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return None
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    logger.info("wrote %d rows to %s", len(frame), target)
    return target

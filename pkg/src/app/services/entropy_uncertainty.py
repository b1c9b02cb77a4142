"""Entropy-based uncertainty of an ensemble's class distributions (in bits).

total     = H(mean of the member distributions)
aleatoric = mean of the member entropies
epistemic = total - aleatoric
"""
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np
from scipy.special import entr

from app.models.uncertainty import EntropyUncertainty

LN2 = np.log(2.0)
# Jensen guarantees total >= aleatoric; rounding may undershoot by this much
CLAMP_TOLERANCE = 1e-12


def _entropy_bits(probs: np.ndarray) -> np.ndarray:
    # entr(0) == 0, i.e. 0 * log 0 := 0
    return entr(probs).sum(axis=-1) / LN2


def _as_ensemble(dists: Sequence[np.ndarray]) -> np.ndarray:
    arr = np.asarray(dists, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("expected a non-empty list of distributions over the same classes")
    return arr


def shannon_entropy(dist: np.ndarray) -> float:
    return float(_entropy_bits(np.asarray(dist, dtype=np.float64)))


def aleatoric_entropy(dists: Sequence[np.ndarray]) -> float:
    return float(_entropy_bits(_as_ensemble(dists)).mean())


def total_entropy(dists: Sequence[np.ndarray]) -> float:
    return float(_entropy_bits(_as_ensemble(dists).mean(axis=0)))


def _clamp_epistemic(value: np.ndarray) -> np.ndarray:
    return np.where((value < 0) & (value >= -CLAMP_TOLERANCE), 0.0, value)


def entropy_uncertainty(dists: Sequence[np.ndarray]) -> EntropyUncertainty:
    ensemble = _as_ensemble(dists)
    total = float(_entropy_bits(ensemble.mean(axis=0)))
    aleatoric = float(_entropy_bits(ensemble).mean())
    epistemic = float(_clamp_epistemic(np.asarray(total - aleatoric)))
    return EntropyUncertainty(total=total, aleatoric=aleatoric, epistemic=epistemic)


def entropy_uncertainty_batch(probs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized form over an (M, N, K) array; returns (total, aleatoric, epistemic)."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 3 or probs.shape[0] == 0:
        raise ValueError(f"expected an (M, N, K) array with M >= 1, got shape {probs.shape}")
    total = _entropy_bits(probs.mean(axis=0))
    aleatoric = _entropy_bits(probs).mean(axis=0)
    return total, aleatoric, _clamp_epistemic(total - aleatoric)

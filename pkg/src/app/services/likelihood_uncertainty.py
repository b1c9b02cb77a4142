"""Relative-likelihood uncertainty for binary leaves.

A leaf with ``n`` positive and ``p`` negative instances induces the normalized
likelihood ``L(t) = t^n (1-t)^p / (t_ml^n (1-t_ml)^p)`` over the positive-class
probability ``t``. The support of the positive class is
``sup_t min(L(t), 2t - 1)``; the support of the negative class is the same problem
with ``n`` and ``p`` exchanged.
"""
from __future__ import annotations

import logging
import threading
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import xlogy

from app.models.errors import UnsupportedTaskError
from app.models.forest import Forest
from app.models.uncertainty import LeafCounts, RLUncertainty, SupportDegrees

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_TOTAL = 256
GRID_POINTS = 1001
POSITIVE_CLASS = 1


def _log_likelihood(theta, counts: LeafCounts):
    # xlogy(0, 0) == 0 gives the 0^0 = 1 convention
    return xlogy(counts.n, theta) + xlogy(counts.p, 1.0 - theta)


def normalized_likelihood(theta, counts: LeafCounts):
    """L(theta) / L(theta_ml), evaluated in log space; identically 1 for an empty leaf."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any((theta < 0.0) | (theta > 1.0)):
        raise ValueError("theta must lie in [0, 1]")
    if counts.total == 0:
        value = np.ones_like(theta)
    else:
        peak = _log_likelihood(counts.theta_ml, counts)
        value = np.exp(_log_likelihood(theta, counts) - peak)
        value = np.where(theta == counts.theta_ml, 1.0, value)
    return float(value) if value.ndim == 0 else value


def _positive_support(counts: LeafCounts, tol: float) -> float:
    """sup over theta of min(L(theta), 2 theta - 1).

    The gap L(theta) - (2 theta - 1) is non-negative at theta_ml and strictly
    decreasing beyond it, so the supremum is 2 theta* - 1 at the last point where the
    gap is non-negative. A dense grid brackets that point and Brent's method refines it.
    """
    grid = np.union1d(np.linspace(0.0, 1.0, GRID_POINTS), [counts.theta_ml])

    def gap(theta):
        return normalized_likelihood(theta, counts) - (2.0 * theta - 1.0)

    values = gap(grid)
    last = int(np.flatnonzero(values >= 0.0)[-1])
    if last == len(grid) - 1:
        return 1.0
    lo, hi = grid[last], grid[last + 1]
    theta_star = brentq(gap, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
    return float(min(1.0, max(0.0, 2.0 * theta_star - 1.0)))


def support_degrees(counts: LeafCounts, tol: float = DEFAULT_TOL) -> SupportDegrees:
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    return SupportDegrees(
        pi_pos=_positive_support(counts, tol),
        # theta -> 1 - theta maps the negative-class problem onto the swapped counts
        pi_neg=_positive_support(counts.swapped(), tol),
    )


def rl_uncertainty(counts: LeafCounts, tol: float = DEFAULT_TOL) -> RLUncertainty:
    return RLUncertainty.from_support(support_degrees(counts, tol))


class UncertaintyTable:
    """Thread-safe memo of support degrees keyed by leaf counts ``(n, p)``.

    ``precompute`` fills every pair with ``n + p <= max_total``; other pairs are
    computed on first use and kept.
    """

    def __init__(self, max_total: int = DEFAULT_MAX_TOTAL, tol: float = DEFAULT_TOL):
        if max_total < 0:
            raise ValueError(f"max_total must be >= 0, got {max_total}")
        self.max_total = max_total
        self.tol = tol
        self._support: Dict[Tuple[int, int], SupportDegrees] = {}
        self._lock = threading.Lock()

    def precompute(self) -> "UncertaintyTable":
        for total in range(self.max_total + 1):
            for n in range(total + 1):
                self.support(n, total - n)
        logger.debug("precomputed %d leaf-count pairs up to n+p=%d", len(self), self.max_total)
        return self

    def support(self, n: int, p: int) -> SupportDegrees:
        key = (int(n), int(p))
        with self._lock:
            cached = self._support.get(key)
        if cached is not None:
            return cached
        value = support_degrees(LeafCounts(*key), self.tol)
        with self._lock:
            self._support.setdefault(key, value)
        return value

    def lookup(self, n: int, p: int) -> RLUncertainty:
        return RLUncertainty.from_support(self.support(n, p))

    def __contains__(self, key: Tuple[int, int]) -> bool:
        with self._lock:
            return tuple(key) in self._support

    def __len__(self) -> int:
        with self._lock:
            return len(self._support)

    def rows(self) -> Iterator[Tuple[int, int, float, float, float, float]]:
        """(n, p, pi_pos, pi_neg, u_e, u_a) for every pair with n + p <= max_total."""
        for total in range(self.max_total + 1):
            for n in range(total + 1):
                p = total - n
                support = self.support(n, p)
                unc = RLUncertainty.from_support(support)
                yield n, p, support.pi_pos, support.pi_neg, unc.epistemic, unc.aleatoric


def build_uncertainty_table(max_total: int = DEFAULT_MAX_TOTAL, tol: float = DEFAULT_TOL) -> UncertaintyTable:
    return UncertaintyTable(max_total, tol).precompute()


_shared_tables: Dict[float, UncertaintyTable] = {}
_shared_lock = threading.Lock()


def shared_table(tol: float = DEFAULT_TOL) -> UncertaintyTable:
    """Process-wide lazily filled table for the given tolerance."""
    with _shared_lock:
        table = _shared_tables.get(tol)
        if table is None:
            table = _shared_tables[tol] = UncertaintyTable(DEFAULT_MAX_TOTAL, tol)
        return table


def _require_binary(forest: Forest) -> None:
    if forest.class_count != 2:
        raise UnsupportedTaskError(
            f"relative-likelihood uncertainty needs a binary task, this forest has {forest.class_count} classes"
        )


def forest_rl_uncertainty_batch(
    forest: Forest, X: np.ndarray, table: Optional[UncertaintyTable] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row (epistemic, aleatoric), each the mean over the trees of the leaf values."""
    _require_binary(forest)
    table = table or shared_table()
    # shape (M, N, 2): raw in-bag leaf counts per tree and row
    counts = np.stack([tree.leaf_counts_batch(X) for tree in forest.trees])
    pairs = np.stack([counts[..., POSITIVE_CLASS], counts[..., 1 - POSITIVE_CLASS]], axis=-1)
    unique, inverse = np.unique(pairs.reshape(-1, 2), axis=0, return_inverse=True)
    values = np.array([
        [u.epistemic, u.aleatoric]
        for u in (table.lookup(int(n), int(p)) for n, p in unique)
    ])
    per_leaf = values[inverse.reshape(-1)].reshape(pairs.shape)
    mean = per_leaf.mean(axis=0)
    return mean[:, 0], mean[:, 1]


def forest_rl_uncertainty(forest: Forest, x: np.ndarray, table: Optional[UncertaintyTable] = None) -> RLUncertainty:
    _require_binary(forest)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a single feature vector, got shape {arr.shape}")
    epistemic, aleatoric = forest_rl_uncertainty_batch(forest, arr.reshape(1, -1), table)
    return RLUncertainty(epistemic=float(epistemic[0]), aleatoric=float(aleatoric[0]))

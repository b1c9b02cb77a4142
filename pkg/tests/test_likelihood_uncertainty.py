"""Unit tests for relative-likelihood uncertainty."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from scipy.special import xlogy

from app.models.errors import UnsupportedTaskError
from app.models.uncertainty import LeafCounts, SupportDegrees
from app.services.likelihood_uncertainty import (
    UncertaintyTable,
    build_uncertainty_table,
    forest_rl_uncertainty,
    forest_rl_uncertainty_batch,
    normalized_likelihood,
    rl_uncertainty,
    support_degrees,
)


def brute_force_support(n, p, step=1e-6):
    """Grid maximization of min(L(t), 2t - 1) and min(L(t), 1 - 2t)."""
    theta = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    total = n + p
    if total == 0:
        likelihood = np.ones_like(theta)
    else:
        ml = n / total
        peak = xlogy(n, ml) + xlogy(p, 1 - ml)
        likelihood = np.exp(xlogy(n, theta) + xlogy(p, 1 - theta) - peak)
    pos = np.max(np.minimum(likelihood, 2 * theta - 1))
    neg = np.max(np.minimum(likelihood, 1 - 2 * theta))
    return pos, neg


@pytest.mark.unit
@pytest.mark.likelihood
class TestLeafCounts:
    def test_theta_ml(self):
        """Test the maximum-likelihood estimate of a leaf."""
        assert LeafCounts(3, 1).theta_ml == 0.75
        assert LeafCounts(0, 0).theta_ml == 0.5

    def test_negative_counts(self):
        """Test that negative counts are rejected."""
        with pytest.raises(ValueError):
            LeafCounts(-1, 2)


@pytest.mark.unit
@pytest.mark.likelihood
class TestNormalizedLikelihood:
    def test_at_maximum(self):
        """Test that the likelihood is 1 at its maximum."""
        assert normalized_likelihood(0.5, LeafCounts(1, 1)) == 1.0

    def test_empty_leaf(self):
        """Test that an empty leaf has likelihood 1 everywhere."""
        for theta in (0.0, 0.3, 1.0):
            assert normalized_likelihood(theta, LeafCounts(0, 0)) == 1.0

    def test_single_positive(self):
        """Test that one positive gives likelihood theta."""
        assert normalized_likelihood(0.25, LeafCounts(1, 0)) == pytest.approx(0.25)

    def test_vectorized(self):
        """Test that arrays of theta are accepted."""
        values = normalized_likelihood(np.array([0.0, 0.5, 1.0]), LeafCounts(2, 0))
        np.testing.assert_allclose(values, [0.0, 0.25, 1.0])

    def test_bounds(self):
        """Test that the likelihood stays in [0, 1]."""
        values = normalized_likelihood(np.linspace(0, 1, 101), LeafCounts(7, 3))
        assert np.all((values >= 0.0) & (values <= 1.0))

    def test_out_of_range(self):
        """Test that theta outside [0, 1] is rejected."""
        with pytest.raises(ValueError):
            normalized_likelihood(1.5, LeafCounts(1, 1))


@pytest.mark.unit
@pytest.mark.likelihood
class TestSupportDegrees:
    """Test suite for support_degrees and rl_uncertainty."""

    def test_empty_leaf(self):
        """Test that an empty leaf fully supports both classes."""
        assert support_degrees(LeafCounts(0, 0)) == SupportDegrees(1.0, 1.0)

    def test_single_positive(self):
        """Test the supports of a leaf holding one positive."""
        support = support_degrees(LeafCounts(1, 0))
        assert support.pi_pos == 1.0
        assert support.pi_neg == pytest.approx(1 / 3, abs=1e-6)

    def test_balanced_is_symmetric(self):
        """Test that balanced counts support both classes equally."""
        support = support_degrees(LeafCounts(5, 5))
        assert support.pi_pos == support.pi_neg
        assert support.pi_pos == pytest.approx(brute_force_support(5, 5)[0], abs=1e-4)

    def test_bad_tolerance(self):
        """Test that a non-positive tolerance is rejected."""
        with pytest.raises(ValueError):
            support_degrees(LeafCounts(1, 1), tol=0.0)

    def test_spot_values(self):
        """Test support degrees against known values."""
        u = rl_uncertainty(LeafCounts(0, 0))
        assert (u.epistemic, u.aleatoric) == (1.0, 0.0)
        u = rl_uncertainty(LeafCounts(1, 0))
        assert u.epistemic == pytest.approx(1 / 3, abs=1e-6)
        assert u.aleatoric == pytest.approx(0.0, abs=1e-12)

    def test_more_evidence_shifts_uncertainty(self):
        """Test that more data lowers epistemic and raises aleatoric uncertainty."""
        small = rl_uncertainty(LeafCounts(5, 5))
        large = rl_uncertainty(LeafCounts(50, 50))
        assert large.epistemic < small.epistemic
        assert large.aleatoric > small.aleatoric

    def test_ranges(self):
        """Test that supports and uncertainties stay in [0, 1]."""
        for n in range(8):
            for p in range(8):
                u = rl_uncertainty(LeafCounts(n, p))
                assert 0.0 <= u.epistemic <= 1.0
                assert 0.0 <= u.aleatoric <= 1.0

    def test_class_symmetry(self):
        """Test that swapping the counts swaps the supports."""
        for n in range(21):
            for p in range(21):
                a = rl_uncertainty(LeafCounts(n, p))
                b = rl_uncertainty(LeafCounts(p, n))
                assert abs(a.epistemic - b.epistemic) <= 1e-9
                assert abs(a.aleatoric - b.aleatoric) <= 1e-9

    def test_scaling_monotonicity(self):
        """Test that scaling the counts never raises epistemic uncertainty."""
        for n, p in [(1, 0), (1, 1), (2, 1), (3, 1), (4, 3)]:
            epistemic = [rl_uncertainty(LeafCounts(k * n, k * p)).epistemic for k in range(1, 11)]
            assert all(b <= a + 1e-9 for a, b in zip(epistemic, epistemic[1:]))
        for n in (1, 2, 3):
            aleatoric = [rl_uncertainty(LeafCounts(k * n, k * n)).aleatoric for k in range(1, 11)]
            assert all(b >= a - 1e-9 for a, b in zip(aleatoric, aleatoric[1:]))

    @pytest.mark.slow
    def test_matches_grid_search(self):
        """Test the solver against a dense grid search."""
        for total in range(51):
            for n in range(total + 1):
                p = total - n
                support = support_degrees(LeafCounts(n, p))
                pos, neg = brute_force_support(n, p)
                assert support.pi_pos == pytest.approx(pos, abs=1e-4), (n, p)
                assert support.pi_neg == pytest.approx(neg, abs=1e-4), (n, p)


@pytest.mark.unit
@pytest.mark.likelihood
class TestUncertaintyTable:
    """Test suite for the precomputed (n, p) table."""

    def test_zero_total(self):
        """Test the table for max total 0."""
        rows = list(build_uncertainty_table(0).rows())
        assert rows == [(0, 0, 1.0, 1.0, 1.0, 0.0)]

    def test_row_count_and_order(self):
        """Test row count and (n + p, n) ordering."""
        rows = list(build_uncertainty_table(2).rows())
        assert [(n, p) for n, p, *_ in rows] == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]

    def test_entries_match_direct_calls(self):
        """Test that table rows equal direct computations."""
        table = build_uncertainty_table(6)
        for n, p, pi_pos, pi_neg, u_e, u_a in table.rows():
            direct = rl_uncertainty(LeafCounts(n, p))
            assert (u_e, u_a) == (direct.epistemic, direct.aleatoric)
            assert table.support(n, p) == SupportDegrees(pi_pos, pi_neg)

    def test_symmetry(self):
        """Test that mirrored pairs have mirrored supports."""
        table = build_uncertainty_table(40)
        for n in range(21):
            for p in range(21):
                assert table.lookup(n, p).epistemic == table.lookup(p, n).epistemic

    def test_lazy_fill(self):
        """Test that lookups fill the memo on demand."""
        table = UncertaintyTable(max_total=4)
        assert len(table) == 0
        table.lookup(30, 2)
        assert (30, 2) in table
        assert len(table) == 1

    def test_precompute_size(self):
        """Test the number of pairs after precompute."""
        assert len(build_uncertainty_table(3)) == 10

    def test_negative_max_total(self):
        """Test that a negative max total is rejected."""
        with pytest.raises(ValueError):
            UncertaintyTable(max_total=-1)

    def test_concurrent_lookups(self):
        """Test that concurrent lookups agree with direct calls."""
        table = UncertaintyTable(max_total=10)
        pairs = [(n, p) for n in range(10) for p in range(10)] * 4
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda pair: table.lookup(*pair), pairs))
        for (n, p), value in zip(pairs, results):
            assert value == rl_uncertainty(LeafCounts(n, p))
        assert len(table) == 100

    def test_membership_and_size_take_the_lock(self, mocker):
        """Test that `in` and len() read the memo under the table lock."""
        table = UncertaintyTable(max_total=2).precompute()
        lock = mocker.MagicMock()
        table._lock = lock
        assert (1, 1) in table
        assert len(table) == 6
        assert lock.__enter__.call_count == 2
        assert lock.__exit__.call_count == 2

    def test_membership_during_concurrent_fill(self):
        """Test that membership checks running beside lookups see every finished pair."""
        table = UncertaintyTable(max_total=12)
        pairs = [(n, p) for n in range(12) for p in range(12)]

        def fill_then_check(pair):
            table.lookup(*pair)
            return pair in table and len(table) >= 1

        with ThreadPoolExecutor(max_workers=8) as pool:
            assert all(pool.map(fill_then_check, pairs))
        assert len(table) == len(pairs)


@pytest.mark.unit
@pytest.mark.likelihood
class TestForestRlUncertainty:
    """Test suite for averaging leaf uncertainties over a forest."""

    def test_single_empty_leaf(self, leaf_forest):
        """Test that an empty leaf is fully epistemic."""
        u = forest_rl_uncertainty(leaf_forest([0, 0]), np.zeros(2))
        assert (u.epistemic, u.aleatoric) == (1.0, 0.0)

    def test_two_leaves(self, leaf_forest):
        """Test averaging over two leaves."""
        # counts are per class index; class 1 is the positive class
        u = forest_rl_uncertainty(leaf_forest([0, 0], [0, 1]), np.zeros(2))
        assert u.epistemic == pytest.approx(2 / 3, abs=1e-6)
        assert u.aleatoric == pytest.approx(0.0, abs=1e-12)

    def test_ternary_forest_rejected(self, leaf_forest):
        """Test that three-class forests are refused."""
        with pytest.raises(UnsupportedTaskError):
            forest_rl_uncertainty(leaf_forest([1, 1, 1]), np.zeros(2))

    def test_batch_matches_single(self, small_forest, gaussian_dataset):
        """Test that the batched form agrees with the per-instance form."""
        X = gaussian_dataset.features[:15]
        epistemic, aleatoric = forest_rl_uncertainty_batch(small_forest, X)
        for i, x in enumerate(X):
            u = forest_rl_uncertainty(small_forest, x)
            assert epistemic[i] == pytest.approx(u.epistemic)
            assert aleatoric[i] == pytest.approx(u.aleatoric)

    def test_batch_is_mean_of_leaves(self, small_forest, gaussian_dataset):
        """Test that batch values are the mean over tree leaves."""
        x = gaussian_dataset.features[3]
        expected = []
        for tree in small_forest.trees:
            counts, _ = tree.leaf_counts(x)
            expected.append(rl_uncertainty(LeafCounts(int(counts[1]), int(counts[0]))))
        u = forest_rl_uncertainty(small_forest, x)
        assert u.epistemic == pytest.approx(np.mean([e.epistemic for e in expected]))
        assert u.aleatoric == pytest.approx(np.mean([e.aleatoric for e in expected]))

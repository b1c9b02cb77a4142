"""Integration tests for the complete train / score / experiment workflow."""
import numpy as np
import pandas as pd
import pytest
from scipy.stats import spearmanr

from app.models.dataset import Dataset
from app.models.forest import ForestConfig
from app.services.dataset_loader import load_csv, write_csv
from app.services.evaluation import run_experiment
from app.services.settings_loader import SettingsLoader
from app.services.synthetic import make_gaussian_dataset
from app.views.cli import EXIT_OK, main


@pytest.mark.integration
@pytest.mark.e2e
class TestCompleteWorkflow:
    """End-to-end tests driving the command line."""

    def test_train_then_score(self, tmp_path):
        """Test training a model and scoring its own data from the CLI."""
        settings = SettingsLoader(environ={"RFU_OUTPUT_DIR": str(tmp_path / "out")})
        data = write_csv(make_gaussian_dataset(n=150, seed=9), tmp_path / "data.csv")

        assert main(["train", "--data", str(data), "--trees", "10", "--seed", "2"], settings=settings) == EXIT_OK
        model = tmp_path / "out" / "model.json"
        assert model.is_file()

        code = main(["uncertainty", "--model", str(model), "--data", str(data), "--label-col", "label"],
                    settings=settings)
        assert code == EXIT_OK
        scores = pd.read_csv(tmp_path / "out" / "uncertainty.csv")
        assert len(scores) == 150
        assert scores[["au_rl", "eu_rl"]].notna().all().all()
        assert ((scores["eu_rl"] >= 0) & (scores["eu_rl"] <= 1)).all()

        # training rows are mostly predicted correctly
        truth = load_csv(data).label_names()
        labels = [truth[k] for k in load_csv(data).labels]
        assert np.mean(scores["prediction"] == labels) > 0.7

    def test_experiment_defaults_written(self, tmp_path):
        """Test that an experiment writes curves.csv to the output directory."""
        settings = SettingsLoader(environ={"RFU_OUTPUT_DIR": str(tmp_path)})
        data = write_csv(make_gaussian_dataset(n=100, seed=1), tmp_path / "data.csv")
        code = main(["experiment", "--data", str(data), "--reps", "2", "--trees", "4", "--max-depth", "3"],
                    settings=settings)
        assert code == EXIT_OK
        frame = pd.read_csv(tmp_path / "curves.csv")
        first = frame[frame["rejection_fraction"] == 0.0]
        # every criterion starts at the same plain test accuracy
        assert first["mean_accuracy"].nunique() == 1


@pytest.mark.integration
@pytest.mark.e2e
@pytest.mark.slow
class TestAccuracyRejectionProtocol:
    """Reproduces the repeated-split protocol on noisy two-Gaussian data."""

    def test_curves_beat_random_and_increase(self):
        """Test that uncertainty curves rise and stay above the random baseline."""
        dataset = make_gaussian_dataset(n=1000, label_noise=0.2, seed=0)
        config = ForestConfig(n_trees=50, max_depth=10, seed=2024)
        result = run_experiment(dataset, config, repetitions=100, n_jobs=-1)

        random = result.curves["random"]
        window = random.rejection <= 0.5
        for criterion in ("au_ent", "eu_ent", "au_rl", "eu_rl"):
            curve = result.curves[criterion]
            margin = 2 * np.sqrt(curve.stderr ** 2 + random.stderr ** 2)
            assert np.all(curve.mean[window] >= random.mean[window] - margin[window]), criterion
            rho = spearmanr(curve.rejection[window], curve.mean[window])[0]
            assert rho > 0.8, (criterion, rho)

    def test_oracle_self_test(self):
        """Test that the oracle curve reaches 1 at the error rate."""
        dataset = make_gaussian_dataset(n=400, seed=6)
        result = run_experiment(dataset, ForestConfig(n_trees=20, seed=3), repetitions=1, step=0.01,
                                criteria=["oracle"])
        curve = result.curves["oracle"]
        error_rate = 1.0 - result.mean_accuracy
        reached = curve.rejection >= error_rate + 1e-9
        assert np.all(curve.mean[reached] == 1.0)

    def test_uci_scale_smoke(self):
        """Test an experiment on eight-feature data with default settings."""
        rng = np.random.default_rng(8)
        features = rng.normal(size=(400, 8))
        logits = features[:, 0] - 0.8 * features[:, 3] + 0.5 * features[:, 6] + rng.normal(0, 0.7, 400)
        dataset = Dataset(features=features, labels=(logits > 0).astype(int), class_count=2)
        result = run_experiment(dataset, ForestConfig(), repetitions=3, n_jobs=-1)
        assert set(result.criteria()) >= {"au_ent", "eu_ent", "au_rl", "eu_rl"}
        assert result.mean_accuracy > 0.6

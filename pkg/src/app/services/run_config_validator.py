from typing import List, Tuple

from app.models.evaluation import ALL_CRITERIA
from app.models.run_config import RunConfig


class RunConfigValidator:
    """Checks a parsed RunConfig against every module's preconditions."""

    @classmethod
    def validate_forest(cls, config: RunConfig) -> List[Tuple[bool, str]]:
        forest = config.forest
        return [
            (forest.n_trees >= 1, f"--trees must be >= 1, got {forest.n_trees}"),
            (forest.max_depth >= 0, f"--max-depth must be >= 0, got {forest.max_depth}"),
            (forest.min_samples_split >= 2, f"--min-samples-split must be >= 2, got {forest.min_samples_split}"),
            (forest.max_features is None or forest.max_features >= 1,
             f"--max-features must be >= 1, got {forest.max_features}"),
            (0.0 < forest.train_fraction < 1.0, f"--train-fraction must lie in (0, 1), got {forest.train_fraction}"),
            (0 <= forest.seed < 2 ** 64, f"--seed must be an unsigned 64-bit integer, got {forest.seed}"),
        ]

    @classmethod
    def validate_experiment(cls, config: RunConfig) -> List[Tuple[bool, str]]:
        checks = [
            (config.repetitions >= 1, f"--reps must be >= 1, got {config.repetitions}"),
            (0.0 < config.step < 1.0, f"--step must lie in (0, 1), got {config.step}"),
        ]
        for criterion in config.criteria or ():
            checks.append((criterion in ALL_CRITERIA,
                           f"unknown criterion {criterion!r}; choose from {', '.join(ALL_CRITERIA)}"))
        return checks

    @classmethod
    def validate_common(cls, config: RunConfig) -> List[Tuple[bool, str]]:
        return [
            (config.tol > 0, f"--tol must be > 0, got {config.tol}"),
            (config.threads != 0, "--threads must not be 0 (use 1 for serial, -1 for all cores)"),
            (config.max_total >= 0, f"--max-total must be >= 0, got {config.max_total}"),
        ]

    @classmethod
    def validate(cls, config: RunConfig) -> List[str]:
        """Return the reasons of every failed check (empty when the config is usable)."""
        checks = cls.validate_common(config)
        if config.subcommand in ("train", "experiment"):
            checks += cls.validate_forest(config)
        if config.subcommand == "experiment":
            checks += cls.validate_experiment(config)
        return [reason for ok, reason in checks if not ok]

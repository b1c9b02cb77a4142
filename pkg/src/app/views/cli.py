"""Command-line surface: train, uncertainty, experiment, rl-table and compare."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app import __version__
from app.models.errors import SchemaMismatchError, UncertaintyForestError
from app.models.forest import ForestConfig
from app.models.run_config import RunConfig
from app.services.dataset_loader import DatasetLoader, load_csv
from app.services.evaluation import align_to_model, compare_uncertainties, run_experiment, score_test_set
from app.services.forest_builder import fit_forest
from app.services.likelihood_uncertainty import UncertaintyTable
from app.services.model_store import load_model, save_model
from app.services.report_writer import curves_frame, table_frame, uncertainty_frame, write_frame
from app.services.run_config_validator import RunConfigValidator
from app.services.settings_loader import SettingsLoader

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DATA = 3

FOREST_FLAGS = {
    "trees": "n_trees",
    "max_depth": "max_depth",
    "min_samples_split": "min_samples_split",
    "max_features": "max_features",
    "train_fraction": "train_fraction",
    "stratify": "stratify",
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
    common.add_argument("--threads", type=int, help="workers for tree fitting and repetitions (-1 = all cores)")
    common.add_argument("--output-dir", type=Path, help="directory for default output files")
    common.add_argument("--seed", type=int, help="seed of every random stream")
    common.add_argument("--label-col", metavar="NAME|INDEX", help="label column (default: last column)")
    common.add_argument("--header", action=argparse.BooleanOptionalAction, default=None,
                        help="force the first CSV row to be (or not be) a header")
    common.add_argument("--tol", type=float, help="root-finding tolerance of the support degrees")
    return common


def _forest_options() -> argparse.ArgumentParser:
    forest = argparse.ArgumentParser(add_help=False)
    forest.add_argument("--trees", type=int, help="number of trees")
    forest.add_argument("--max-depth", type=int, help="maximum tree depth")
    forest.add_argument("--min-samples-split", type=int, help="smallest node that may be split")
    forest.add_argument("--max-features", type=int, help="candidate features per node (default ceil(sqrt(D)))")
    forest.add_argument("--train-fraction", type=float, help="share of rows used for training")
    forest.add_argument("--stratify", action=argparse.BooleanOptionalAction, default=None,
                        help="keep class proportions in the train/test split")
    return forest


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    forest = _forest_options()
    parser = argparse.ArgumentParser(
        prog="rf-uncertainty",
        description="Random-forest classification with aleatoric/epistemic uncertainty estimates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    train = commands.add_parser("train", parents=[common, forest], help="fit a forest and save it as JSON")
    train.add_argument("--data", type=Path, required=True, help="labelled CSV file")
    train.add_argument("--out", type=Path, help="model file (default <output-dir>/model.json)")

    uncertainty = commands.add_parser("uncertainty", parents=[common],
                                      help="per-instance predictions and uncertainty degrees")
    uncertainty.add_argument("--model", type=Path, required=True, help="model JSON written by train")
    uncertainty.add_argument("--data", type=Path, required=True,
                             help="query CSV (a --label-col column is dropped)")
    uncertainty.add_argument("--out", type=Path, help="CSV file (default <output-dir>/uncertainty.csv)")

    experiment = commands.add_parser("experiment", parents=[common, forest],
                                     help="repeated accuracy-rejection experiment")
    experiment.add_argument("--data", type=Path, required=True, help="labelled CSV file")
    experiment.add_argument("--reps", type=int, help="number of repetitions")
    experiment.add_argument("--step", type=float, help="rejection-fraction grid step")
    experiment.add_argument("--criteria", help="comma-separated criteria (e.g. au_ent,eu_rl,random)")
    experiment.add_argument("--plot", action="store_true", help="also write one SVG per criterion")
    experiment.add_argument("--out", type=Path, help="curves CSV (default <output-dir>/curves.csv)")

    table = commands.add_parser("rl-table", parents=[common], help="dump the relative-likelihood table")
    table.add_argument("--max-total", type=int, help="largest leaf size n + p")
    table.add_argument("--out", type=Path, help="CSV file (default: stdout)")

    compare = commands.add_parser("compare", parents=[common],
                                  help="rank correlation between entropy and likelihood estimates")
    compare.add_argument("--model", type=Path, required=True, help="binary model JSON written by train")
    compare.add_argument("--data", type=Path, required=True, help="labelled CSV file")
    compare.add_argument("--plot", action="store_true", help="write compare_aleatoric.svg / compare_epistemic.svg")
    return parser


def _label_column(raw: Optional[str]):
    if raw is None:
        return None
    stripped = raw.strip()
    return int(stripped) if stripped.lstrip("-").isdigit() else stripped


def build_run_config(args: argparse.Namespace, settings: SettingsLoader) -> RunConfig:
    """Merge flags over environment over packaged defaults."""
    forest_defaults = settings.section("forest")
    experiment_defaults = settings.section("experiment")
    likelihood_defaults = settings.section("likelihood")

    forest_values = {field: forest_defaults[field] for field in FOREST_FLAGS.values() if field in forest_defaults}
    for flag, field in FOREST_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            forest_values[field] = value
    seed = args.seed if args.seed is not None else experiment_defaults.get("seed", 0)
    forest_values["seed"] = seed

    criteria = getattr(args, "criteria", None)
    return RunConfig(
        subcommand=args.subcommand,
        data=getattr(args, "data", None),
        label_column=_label_column(args.label_col),
        header=args.header,
        model=getattr(args, "model", None),
        out=getattr(args, "out", None),
        output_dir=args.output_dir if args.output_dir is not None else settings.output_directory(),
        forest=ForestConfig(**forest_values),
        repetitions=_pick(getattr(args, "reps", None), experiment_defaults.get("repetitions", 100)),
        step=_pick(getattr(args, "step", None), experiment_defaults.get("step", 0.02)),
        criteria=tuple(c.strip() for c in criteria.split(",") if c.strip()) if criteria else None,
        tol=_pick(args.tol, likelihood_defaults.get("tol", 1e-9)),
        max_total=_pick(getattr(args, "max_total", None), likelihood_defaults.get("table_max_total", 256)),
        threads=args.threads if args.threads is not None else settings.threads(),
        plot=getattr(args, "plot", False),
    )


def _pick(flag, default):
    return default if flag is None else flag


# Subcommands -----------------------------------------------------------------
def cmd_train(config: RunConfig) -> Path:
    dataset = load_csv(config.data, config.label_column, config.header)
    forest = fit_forest(dataset, config.forest, n_jobs=config.threads)
    target = save_model(forest, _prepare(config.output_path("model.json")))
    low, mean, high = forest.depth_stats()
    print(f"Trained {forest.n_trees} trees on N={dataset.n_samples} D={dataset.n_features} K={dataset.class_count}")
    print(f"Tree depth: min {low}, mean {mean:.2f}, max {high}")
    print(f"Model written to {target}")
    return target


def cmd_uncertainty(config: RunConfig) -> Path:
    forest = load_model(config.model)
    features, _ = DatasetLoader(config.data).load_features(config.label_column, config.header)
    if features.shape[1] != forest.n_features:
        raise SchemaMismatchError(
            f"{config.data} has {features.shape[1]} feature columns, the model expects {forest.n_features}"
        )
    frame = uncertainty_frame(forest, features, config.tol)
    target = write_frame(frame, _prepare(config.output_path("uncertainty.csv")))
    print(f"Scored {len(frame)} instances; results written to {target}")
    return target


def cmd_experiment(config: RunConfig) -> Path:
    dataset = load_csv(config.data, config.label_column, config.header)
    result = run_experiment(
        dataset,
        config.forest,
        repetitions=config.repetitions,
        step=config.step,
        criteria=config.criteria,
        tol=config.tol,
        n_jobs=config.threads,
    )
    target = write_frame(curves_frame(result), _prepare(config.output_path("curves.csv")))

    print(f"{result.n_repetitions} repetitions, {result.n_test} test instances each, "
          f"mean accuracy {result.mean_accuracy:.4f}")
    for criterion, summary in result.curves.items():
        print(f"  {criterion:<7} mean accuracy over the curve {float(np.mean(summary.mean)):.4f}")
    if config.plot:
        from app.views.plots import render_curves_svg

        for criterion in result.criteria():
            svg = render_curves_svg(result, criterion, target.with_name(f"{target.stem}_{criterion}.svg"))
            logger.info("wrote %s", svg)
    print(f"Curves written to {target}")
    return target


def cmd_rl_table(config: RunConfig) -> Optional[Path]:
    table = UncertaintyTable(config.max_total, config.tol).precompute()
    return write_frame(table_frame(table), _prepare(config.out) if config.out is not None else None)


def cmd_compare(config: RunConfig) -> Dict[str, float]:
    forest = load_model(config.model)
    dataset = align_to_model(load_csv(config.data, config.label_column, config.header), forest)
    records = score_test_set(forest, dataset, config.tol)
    correlations = compare_uncertainties(records)
    print(f"Spearman AU-ent vs AU-rl: {correlations['aleatoric']:.4f}")
    print(f"Spearman EU-ent vs EU-rl: {correlations['epistemic']:.4f}")
    if config.plot:
        from app.views.plots import render_scatter_svg

        out_dir = _prepare(config.output_dir / "compare_aleatoric.svg").parent
        render_scatter_svg([r.au_ent for r in records], [r.au_rl for r in records], "AU-ent", "AU-rl",
                           "Aleatoric uncertainty", out_dir / "compare_aleatoric.svg")
        render_scatter_svg([r.eu_ent for r in records], [r.eu_rl for r in records], "EU-ent", "EU-rl",
                           "Epistemic uncertainty", out_dir / "compare_epistemic.svg")
    return correlations


COMMANDS: Dict[str, Callable[[RunConfig], object]] = {
    "train": cmd_train,
    "uncertainty": cmd_uncertainty,
    "experiment": cmd_experiment,
    "rl-table": cmd_rl_table,
    "compare": cmd_compare,
}


def _prepare(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    # no-op when the host (e.g. a test runner) already installed handlers
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None, settings: Optional[SettingsLoader] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    settings = settings or SettingsLoader()

    try:
        config = build_run_config(args, settings)
    except ValueError as exc:
        parser.error(str(exc))
    problems: List[str] = RunConfigValidator.validate(config)
    if problems:
        parser.error("; ".join(problems))

    try:
        COMMANDS[config.subcommand](config)
    except UncertaintyForestError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        logger.error("%s", exc)
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK

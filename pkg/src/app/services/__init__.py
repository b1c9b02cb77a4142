from .dataset_loader import DatasetLoader, load_csv, split_dataset, write_csv
from .entropy_uncertainty import entropy_uncertainty, entropy_uncertainty_batch
from .evaluation import accuracy_rejection_curve, compare_uncertainties, run_experiment, score_test_set
from .forest_builder import fit_forest
from .likelihood_uncertainty import UncertaintyTable, forest_rl_uncertainty, rl_uncertainty, support_degrees
from .model_store import ModelStore, load_model, save_model
from .run_config_validator import RunConfigValidator
from .settings_loader import SettingsLoader
from .synthetic import make_gaussian_dataset
from .tree_builder import TreeBuilder, fit_tree

__all__ = [
    'DatasetLoader', 'load_csv', 'write_csv', 'split_dataset',
    'TreeBuilder', 'fit_tree', 'fit_forest',
    'ModelStore', 'save_model', 'load_model',
    'entropy_uncertainty', 'entropy_uncertainty_batch',
    'support_degrees', 'rl_uncertainty', 'forest_rl_uncertainty', 'UncertaintyTable',
    'score_test_set', 'accuracy_rejection_curve', 'run_experiment', 'compare_uncertainties',
    'make_gaussian_dataset', 'SettingsLoader', 'RunConfigValidator',
]

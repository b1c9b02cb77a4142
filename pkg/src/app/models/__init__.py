from .dataset import Dataset, SplitPair
from .errors import (
    DatasetError,
    ModelFormatError,
    SchemaMismatchError,
    UncertaintyForestError,
    UnsupportedTaskError,
)
from .evaluation import AccuracyRejectionCurve, CurveSummary, ExperimentResult, ScoredPrediction
from .forest import Forest, ForestConfig
from .run_config import RunConfig
from .tree import DecisionTree, TreeConfig
from .uncertainty import EntropyUncertainty, LeafCounts, RLUncertainty, SupportDegrees

__all__ = [
    'Dataset',
    'SplitPair',
    'DecisionTree',
    'TreeConfig',
    'Forest',
    'ForestConfig',
    'EntropyUncertainty',
    'LeafCounts',
    'SupportDegrees',
    'RLUncertainty',
    'ScoredPrediction',
    'AccuracyRejectionCurve',
    'CurveSummary',
    'ExperimentResult',
    'RunConfig',
    'UncertaintyForestError',
    'DatasetError',
    'SchemaMismatchError',
    'UnsupportedTaskError',
    'ModelFormatError',
]

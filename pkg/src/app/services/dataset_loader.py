"""CSV ingestion, export and train/test splitting."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from app.models.dataset import Dataset, SplitPair
from app.models.errors import DatasetError

logger = logging.getLogger(__name__)

LabelColumn = Union[str, int]


class DatasetLoader:
    """Read and write comma-separated numeric datasets.

    The first row is a header when ``header`` is True, or, when left as None, when
    some column has a non-numeric first cell above a numeric second cell (a lone
    row counts as a header only if none of its cells are numeric).
    """

    LABEL_HEADER = "label"

    def __init__(self, path: Path | str):
        self.path = Path(path)

    def load(self, label_column: Optional[LabelColumn] = None, header: Optional[bool] = None) -> Dataset:
        names, body, has_header = self._read_table(header)
        if body.shape[1] < 2:
            raise DatasetError(f"{self.path} needs at least one feature column and a label column")

        label_index = self._resolve_label_column(label_column, names, body.shape[1])
        feature_columns = [j for j in range(body.shape[1]) if j != label_index]
        features = self._parse_features(body, feature_columns, names, has_header)

        raw_labels = body.iloc[:, label_index].to_numpy(dtype=str)
        # pd.unique keeps first-appearance order
        class_labels = [str(v) for v in pd.unique(raw_labels)]
        mapping = {name: k for k, name in enumerate(class_labels)}
        labels = np.array([mapping[v] for v in raw_labels], dtype=np.int64)

        dataset = Dataset(
            features=features,
            labels=labels,
            class_count=len(class_labels),
            feature_names=tuple(names[j] for j in feature_columns) if names else None,
            class_labels=tuple(class_labels),
        )
        if dataset.is_single_class:
            logger.warning("%s contains a single class (%s); it can be loaded but not trained on",
                           self.path, class_labels[0])
        logger.info("loaded %s: N=%d D=%d K=%d", self.path, dataset.n_samples,
                    dataset.n_features, dataset.class_count)
        return dataset

    def load_features(self, drop_column: Optional[LabelColumn] = None,
                      header: Optional[bool] = None) -> Tuple[np.ndarray, Optional[List[str]]]:
        """Read an unlabelled query file; ``drop_column`` removes one column (e.g. a label)."""
        names, body, has_header = self._read_table(header)
        columns = list(range(body.shape[1]))
        if drop_column is not None:
            columns.remove(self._resolve_label_column(drop_column, names, body.shape[1]))
        if not columns:
            raise DatasetError(f"{self.path} has no feature columns")
        features = self._parse_features(body, columns, names, has_header)
        logger.info("loaded %d query rows with %d columns from %s", features.shape[0], features.shape[1], self.path)
        return features, [names[j] for j in columns] if names else None

    def save(self, dataset: Dataset) -> Path:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(dataset.features, columns=list(dataset.column_names()))
        names = dataset.label_names()
        frame[self.LABEL_HEADER] = [names[k] for k in dataset.labels]
        frame.to_csv(self.path, index=False, encoding="utf-8", lineterminator="\n")
        return self.path

    # Helpers --------------------------------------------------------------------
    def _read_table(self, header: Optional[bool]) -> Tuple[Optional[List[str]], pd.DataFrame, bool]:
        if not self.path.is_file():
            raise FileNotFoundError(f"dataset file not found: {self.path}")

        try:
            raw = pd.read_csv(
                self.path,
                header=None,
                dtype=str,
                keep_default_na=False,
                skipinitialspace=True,
                encoding="utf-8",
            )
        except pd.errors.EmptyDataError as exc:
            raise DatasetError(f"{self.path} is empty") from exc
        except pd.errors.ParserError as exc:
            raise DatasetError(f"{self.path}: rows do not have a uniform number of columns ({exc})") from exc
        except UnicodeDecodeError as exc:
            raise DatasetError(f"{self.path} is not valid UTF-8: {exc}") from exc

        if raw.isna().to_numpy().any():
            line = int(np.flatnonzero(raw.isna().any(axis=1).to_numpy())[0]) + 1
            raise DatasetError(f"{self.path}: line {line} has fewer columns than the others")
        raw = raw.apply(lambda col: col.str.strip())
        has_header = self._detect_header(raw) if header is None else header
        if has_header:
            names = [str(v) for v in raw.iloc[0].tolist()]
            body = raw.iloc[1:].reset_index(drop=True)
        else:
            names = None
            body = raw
        if body.empty:
            raise DatasetError(f"{self.path} has no data rows")
        return names, body, has_header

    @staticmethod
    def _is_number(cell: str) -> bool:
        try:
            float(cell)
        except ValueError:
            return False
        return True

    def _detect_header(self, raw: pd.DataFrame) -> bool:
        first = raw.iloc[0].tolist()
        if len(raw) == 1:
            return not any(self._is_number(c) for c in first)
        second = raw.iloc[1].tolist()
        return any(not self._is_number(a) and self._is_number(b) for a, b in zip(first, second))

    @staticmethod
    def _resolve_label_column(label_column: Optional[LabelColumn], names: Optional[List[str]], width: int) -> int:
        if label_column is None:
            return width - 1
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if not names or label_column not in names:
                raise DatasetError(f"label column {label_column!r} not found in header {names}")
            return names.index(label_column)
        index = int(label_column)
        if not -width <= index < width:
            raise DatasetError(f"label column index {index} out of range for {width} columns")
        return index % width

    def _parse_features(self, body: pd.DataFrame, columns: List[int], names: Optional[List[str]], has_header: bool) -> np.ndarray:
        block = body.iloc[:, columns]
        numeric = block.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.argwhere(~np.isfinite(numeric))
        if len(bad):
            row, col = bad[0]
            cell = block.iat[row, col]
            column = names[columns[col]] if names else columns[col]
            line = row + 1 + (1 if has_header else 0)
            kind = "non-numeric" if not self._is_number(cell) else "non-finite"
            raise DatasetError(f"{self.path}: {kind} feature value {cell!r} in column {column!r} (line {line})")
        return numeric


def load_csv(path: Path | str, label_column: Optional[LabelColumn] = None, header: Optional[bool] = None) -> Dataset:
    return DatasetLoader(path).load(label_column=label_column, header=header)


def write_csv(dataset: Dataset, path: Path | str) -> Path:
    return DatasetLoader(path).save(dataset)


def split_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


def split_dataset(dataset: Dataset, train_fraction: float = 0.7, seed: int = 0, stratify: bool = False) -> SplitPair:
    """Random train/test partition; identical for identical (dataset, fraction, seed, stratify)."""
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = dataset.n_samples
    if n < 2:
        raise DatasetError(f"cannot split a dataset with {n} row(s)")
    n_train = _round_half_up(train_fraction * n)
    if n_train < 1 or n_train >= n:
        raise DatasetError(f"a {train_fraction:.3f} split of {n} rows leaves one side empty")

    rng = split_rng(seed)
    if stratify:
        train_idx, test_idx = _stratified_indices(dataset.labels, dataset.class_count, n_train, rng)
    else:
        order = rng.permutation(n)
        train_idx, test_idx = order[:n_train], order[n_train:]

    return SplitPair(
        train=dataset.subset(train_idx),
        test=dataset.subset(test_idx),
        seed=int(seed),
        train_indices=train_idx,
        test_indices=test_idx,
    )


def _stratified_indices(labels: np.ndarray, class_count: int, n_train: int, rng: np.random.Generator):
    n = len(labels)
    sizes = np.bincount(labels, minlength=class_count)
    exact = sizes * (n_train / n)
    quotas = np.floor(exact).astype(np.int64)
    remainder = n_train - int(quotas.sum())
    # largest fractional part first, ties by class index
    order = sorted(range(class_count), key=lambda k: (-(exact[k] - quotas[k]), k))
    for k in order[:remainder]:
        quotas[k] += 1

    train_parts, test_parts = [], []
    for k in range(class_count):
        members = np.flatnonzero(labels == k)
        members = members[rng.permutation(len(members))]
        train_parts.append(members[: quotas[k]])
        test_parts.append(members[quotas[k]:])
    train_idx = np.concatenate(train_parts)
    test_idx = np.concatenate(test_parts)
    return train_idx[rng.permutation(len(train_idx))], test_idx[rng.permutation(len(test_idx))]

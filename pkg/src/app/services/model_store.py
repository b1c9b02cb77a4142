import json
from pathlib import Path
from typing import Any, Dict

from app.models.errors import ModelFormatError
from app.models.forest import Forest, ForestConfig
from app.models.tree import DecisionTree


class ModelStore:
    """Persist fitted forests as a single versioned JSON document."""

    FORMAT_VERSION = 1

    def __init__(self, path: Path | str):
        self.path = Path(path)

    def to_payload(self, forest: Forest) -> Dict[str, Any]:
        return {
            "format_version": self.FORMAT_VERSION,
            "config": forest.config.to_dict(),
            "class_labels": list(forest.class_labels),
            "feature_names": list(forest.feature_names) if forest.feature_names is not None else None,
            "n_features": forest.n_features,
            "trees": [tree.to_dict() for tree in forest.trees],
        }

    def dumps(self, forest: Forest) -> str:
        return json.dumps(self.to_payload(forest), separators=(",", ":"), sort_keys=True)

    def save(self, forest: Forest) -> Path:
        text = self.dumps(forest)
        with self.path.open("w", encoding="utf-8") as fp:
            fp.write(text)
            fp.write("\n")
        return self.path

    def load(self) -> Forest:
        with self.path.open("r", encoding="utf-8") as fp:
            try:
                payload = json.load(fp)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"{self.path} is not valid JSON: {exc}") from exc
        return self.from_payload(payload)

    def from_payload(self, payload: Dict[str, Any]) -> Forest:
        if not isinstance(payload, dict):
            raise ModelFormatError("model document must be a JSON object")
        version = payload.get("format_version")
        if version != self.FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format_version {version!r}")
        try:
            class_labels = [str(v) for v in payload["class_labels"]]
            n_features = int(payload["n_features"])
            config = ForestConfig.from_dict(payload["config"])
            tree_payloads = payload["trees"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"model document is missing fields: {exc}") from exc

        class_count = len(class_labels)
        trees = [DecisionTree.from_dict(t, n_features, class_count) for t in tree_payloads]
        return Forest(
            trees=trees,
            config=config,
            class_count=class_count,
            n_features=n_features,
            class_labels=class_labels,
            feature_names=payload.get("feature_names"),
        )


def save_model(forest: Forest, path: Path | str) -> Path:
    return ModelStore(path).save(forest)


def load_model(path: Path | str) -> Forest:
    return ModelStore(path).load()

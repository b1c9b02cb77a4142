import json
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional


class SettingsLoader:
    """Loads packaged defaults and applies environment overrides.

    ``RFU_OUTPUT_DIR`` replaces the output directory, ``RFU_THREADS`` the worker count.
    """

    ENV_OUTPUT_DIR = "RFU_OUTPUT_DIR"
    ENV_THREADS = "RFU_THREADS"

    def __init__(self, config_path: Optional[Path | str] = None, environ: Optional[Mapping[str, str]] = None):
        base_path = Path(config_path) if config_path else Path(__file__).resolve().parents[1] / "data" / "defaults.json"
        self.config_path = base_path
        self.environ = os.environ if environ is None else environ
        self._cache: Optional[Dict[str, Any]] = None

    def load_config(self) -> Dict[str, Any]:
        """Load the JSON defaults (once)."""
        if self._cache is None:
            with self.config_path.open("r", encoding="utf-8") as fp:
                self._cache = json.load(fp)
        return self._cache

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self.load_config().get(name, {}))

    def output_directory(self) -> Path:
        value = self.environ.get(self.ENV_OUTPUT_DIR) or self.section("output").get("directory", ".")
        return Path(value)

    def threads(self) -> int:
        raw = self.environ.get(self.ENV_THREADS)
        if raw is None or raw.strip() == "":
            return int(self.section("output").get("threads", 1))
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{self.ENV_THREADS} must be an integer, got {raw!r}")

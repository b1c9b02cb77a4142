from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

from .forest import ForestConfig


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, after defaults and overrides are merged."""

    subcommand: str
    data: Optional[Path] = None
    label_column: Optional[Union[str, int]] = None
    header: Optional[bool] = None
    model: Optional[Path] = None
    out: Optional[Path] = None
    output_dir: Path = Path(".")
    forest: ForestConfig = field(default_factory=ForestConfig)
    repetitions: int = 100
    step: float = 0.02
    criteria: Optional[Tuple[str, ...]] = None
    tol: float = 1e-9
    max_total: int = 256
    threads: int = 1
    plot: bool = False

    def output_path(self, default_name: str) -> Path:
        return self.out if self.out is not None else self.output_dir / default_name

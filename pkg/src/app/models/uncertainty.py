from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EntropyUncertainty:
    """Entropy decomposition in bits: total = aleatoric + epistemic."""

    total: float
    aleatoric: float
    epistemic: float


@dataclass(frozen=True)
class LeafCounts:
    """Binary leaf evidence: ``n`` positive (class 1) and ``p`` negative (class 0) instances."""

    n: int
    p: int

    def __post_init__(self):
        if self.n < 0 or self.p < 0:
            raise ValueError(f"leaf counts must be non-negative, got n={self.n}, p={self.p}")

    @property
    def total(self) -> int:
        return self.n + self.p

    @property
    def theta_ml(self) -> float:
        """Maximum-likelihood probability of the positive class (0.5 for an empty leaf)."""
        return self.n / self.total if self.total else 0.5

    def swapped(self) -> "LeafCounts":
        return LeafCounts(self.p, self.n)


@dataclass(frozen=True)
class SupportDegrees:
    pi_pos: float
    pi_neg: float


@dataclass(frozen=True)
class RLUncertainty:
    """Relative-likelihood uncertainty degrees, both in [0, 1]."""

    epistemic: float
    aleatoric: float

    @classmethod
    def from_support(cls, support: SupportDegrees) -> "RLUncertainty":
        return cls(
            epistemic=min(support.pi_pos, support.pi_neg),
            aleatoric=1.0 - max(support.pi_pos, support.pi_neg),
        )

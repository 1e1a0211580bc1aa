"""Structured verdicts shared by the characterization tests."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


def aggregate_verdict(verdicts, positive: str = "polynomial", negative: str = "not-polynomial") -> str:
    """Positive only if every item is; negative if any item is."""
    verdicts = list(verdicts)
    if verdicts and all(v == positive for v in verdicts):
        return positive
    if any(v == negative for v in verdicts):
        return negative
    return "inconclusive"


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class DetectionReport:
    test: str
    verdict: str
    residual: float
    items: list[dict] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return _plain(asdict(self))

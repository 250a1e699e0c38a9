from __future__ import annotations

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    worst: float
    threshold: float
    samples: int
    seconds: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "threshold": self.threshold,
            "samples": self.samples,
            "seconds": round(self.seconds, 4),
            "detail": self.detail,
        }


class BaseCheck(ABC):
    """
    Base class for verification checks. Implement measure.
    measure returns (worst, samples, detail) where worst is the largest
    violation found; the check passes when worst <= threshold.
    """

    threshold: float = 0.0

    def name(self) -> str:
        return self.__class__.__name__

    @abstractmethod
    def measure(self, rng: np.random.Generator) -> Tuple[float, int, str]:
        ...

    def run(self, rng: np.random.Generator) -> CheckOutcome:
        started = time.perf_counter()
        worst, samples, detail = self.measure(rng)
        elapsed = time.perf_counter() - started
        return CheckOutcome(
            name=self.name(),
            passed=bool(worst <= self.threshold),
            worst=float(worst),
            threshold=self.threshold,
            samples=samples,
            seconds=elapsed,
            detail=detail,
        )

    def __repr__(self):
        return f"{self.name()}"

from __future__ import annotations

import numpy as np

from ..chebyshev import alternating_sine_sums, identity_residuals
from .base import BaseCheck


class ChebyshevIdentities(BaseCheck):
    """Product and sum identities at random orders in [-8, 8] and q in [-2, 2], relative to term size."""

    threshold = 1e-9
    trials = 1000

    def measure(self, rng):
        worst = 0.0
        where = ""
        for _ in range(self.trials):
            i, j, k = (int(v) for v in rng.integers(-8, 9, size=3))
            q = float(rng.uniform(-2.0, 2.0))
            res = identity_residuals(i, j, k, q)
            rel = res.worst() / max(1.0, res.magnitude)
            if rel > worst:
                worst, where = rel, f"i={i} j={j} k={k} q={q!r}"
        return worst, self.trials, where


class AlternatingSineSums(BaseCheck):
    """Both alternating-sine sums vanish for odd counts of random angles."""

    threshold = 1e-10
    trials_per_size = 50

    def measure(self, rng):
        worst = 0.0
        samples = 0
        for n in (1, 3, 5, 7):
            for _ in range(self.trials_per_size):
                sin_sum, cos_sum = alternating_sine_sums(rng.uniform(-np.pi, np.pi, n))
                worst = max(worst, abs(sin_sum), abs(cos_sum))
                samples += 1
        return worst, samples, "n in {1, 3, 5, 7}"

from __future__ import annotations

import math

from ..means import (
    MeanSpec,
    cosine_bound_check,
    f_lower_bound,
    f_rk,
    f_rk_sharp_point,
    mean_of_chord_ratios,
    sharpness_witness,
)
from .base import BaseCheck

ARITHMETIC = MeanSpec(1.0)
GEOMETRIC = MeanSpec(0.0)


class ArithmeticWitness(BaseCheck):
    """The witness (0, 1, ..., 1, 0) attains (d - 2)/(d - 1)."""

    threshold = 1e-12

    def measure(self, rng):
        worst = 0.0
        for d in range(2, 51):
            achieved = mean_of_chord_ratios(ARITHMETIC, sharpness_witness(ARITHMETIC, 0, d))
            worst = max(worst, abs(achieved - (d - 2) / (d - 1)))
        return worst, 49, "m - n in 2..50"


class GeometricWitness(BaseCheck):
    """Odd windows attain (1 + eps)/2; even windows shrink like eps^(1/(d - 1))."""

    threshold = 1e-12
    odd_epsilon = 1e-3
    even_epsilon = 1e-6

    def measure(self, rng):
        worst = 0.0
        samples = 0
        eps = self.odd_epsilon
        for d in range(3, 51, 2):
            achieved = mean_of_chord_ratios(GEOMETRIC, sharpness_witness(GEOMETRIC, 0, d, eps))
            worst = max(worst, abs(achieved - (1.0 + eps) / 2.0))
            samples += 1
        eps = self.even_epsilon
        for d in range(2, 51, 2):
            achieved = mean_of_chord_ratios(GEOMETRIC, sharpness_witness(GEOMETRIC, 0, d, eps))
            expected = eps ** (1.0 / (d - 1))
            worst = max(worst, abs(achieved - expected) / expected)
            if d <= 4:
                worst = max(worst, achieved - 1e-2)
            samples += 1
        return worst, samples, "odd eps=1e-3, even eps=1e-6"


class PowerBoundF(BaseCheck):
    """Random points never undercut the lower bound of F; the known minimisers attain it."""

    threshold = 1e-9
    trials = 1000

    def measure(self, rng):
        worst = 0.0
        for _ in range(self.trials):
            r = float(rng.uniform(0.05, 4.0))
            k = int(rng.integers(1, 13))
            u = 10.0 * (1.0 - rng.random(k))
            best = f_lower_bound(r, k).best
            worst = max(worst, (best - f_rk(r, u)) / best)

        sharp = 0.0
        for r in (0.25, 0.5, 1.0, 2.0, 3.5):
            for k in (1, 2):
                sharp = max(sharp, abs(f_rk(r, f_rk_sharp_point(r, k)) / f_lower_bound(r, k).best - 1.0))
        for k in range(3, 9):
            sharp = max(sharp, abs(f_rk(1.0, f_rk_sharp_point(1.0, k)) / f_lower_bound(1.0, k).best - 1.0))
        if sharp > 1e-10:
            return math.inf, self.trials, f"sharp point misses its bound by {sharp:.3g}"
        return worst, self.trials, "r in (0, 4], k in 1..12"


class CosineBound(BaseCheck):
    """(m - 4 + sqrt 2)/(m - 2) <= cos(pi/m) for m in 3..10000, with equality at m = 4."""

    threshold = 1e-12
    largest = 10_000

    def measure(self, rng):
        worst = 0.0
        for m in range(3, self.largest + 1):
            check = cosine_bound_check(m)
            if not check.holds:
                return math.inf, m - 2, f"fails at m={m}"
            worst = max(worst, check.lhs - check.rhs)
        at_four = cosine_bound_check(4)
        worst = max(worst, abs(at_four.lhs - at_four.rhs))
        return worst, self.largest - 2, "equality at m=4"

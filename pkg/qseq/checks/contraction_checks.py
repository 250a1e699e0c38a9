from __future__ import annotations

import math

from ..contraction import (
    branch_enumeration_fixed_point,
    default_problem,
    empirical_lipschitz,
    solve_fixed_point,
    solve_fixed_points,
    weighted_norm,
)
from .base import BaseCheck


class LipschitzBound(BaseCheck):
    """Sampled Lipschitz ratios of the operator stay below (n - 1)(n + 3)/(n + 1)^2 under default weights."""

    threshold = 1e-12
    largest = 30
    pairs = 200

    def measure(self, rng):
        worst = -math.inf
        for n in range(1, self.largest + 1):
            prob = default_problem(n, rng.normal(0.0, 1.0, (n + 1) // 2))
            bound = (n - 1) * (n + 3) / (n + 1) ** 2
            worst = max(worst, empirical_lipschitz(prob, self.pairs, scale=10.0, rng=rng) - bound)
        return max(worst, 0.0), self.largest * self.pairs, "default weights, n in 1..30"


class FixedPointUniqueness(BaseCheck):
    """Certified fixed points have small residuals, do not depend on the start and match branch enumeration."""

    threshold = 1e-8
    largest = 50
    gammas = 20
    solve_tol = 1e-10
    residual_limit = 1e-9
    # plain iteration is cross-checked where its n^2 iteration count stays small
    iterate_dimension = 12
    oracle_dimension = 4

    def measure(self, rng):
        worst = 0.0
        samples = 0
        for n in range(1, self.largest + 1):
            problems = [default_problem(n, rng.normal(0.0, 1.0, (n + 1) // 2)) for _ in range(self.gammas)]
            starts = rng.uniform(-10.0, 10.0, (self.gammas, n))
            firsts = [solve_fixed_point(prob, tol=self.solve_tol, method="policy") for prob in problems]
            seconds = [
                solve_fixed_point(prob, tol=self.solve_tol, initial=start, method="policy")
                for prob, start in zip(problems, starts)
            ]
            pairs = list(zip(problems, firsts, seconds))
            if n <= self.iterate_dimension:
                iterated = solve_fixed_points(problems, tol=self.solve_tol, initial=starts)
                pairs += zip(problems, firsts, iterated)
            for prob, first, second in pairs:
                residual = max(first.residual_norm, second.residual_norm)
                if residual > self.residual_limit:
                    return math.inf, samples, f"residual {residual:.3g} at n={n}"
                worst = max(worst, weighted_norm(prob.weights, first.point - second.point))
            if n <= self.oracle_dimension:
                for prob, first in zip(problems, firsts):
                    oracle = branch_enumeration_fixed_point(prob)
                    worst = max(worst, float(abs(first.point - oracle).max()))
            samples += self.gammas
        return worst, samples, f"n in 1..{self.largest}, {self.gammas} gammas each"

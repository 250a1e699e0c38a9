from __future__ import annotations

import math

import numpy as np

from ..sequences import (
    AffineRep,
    Verdict,
    WindowSequence,
    affine_coeffs,
    affine_envelope,
    chord_ratios,
    classify,
    make_affine,
    materialize_envelope,
    pointwise_min,
    sine_sequence,
)
from .base import BaseCheck


class AffineRoundTrip(BaseCheck):
    """make_affine followed by affine_coeffs recovers (a, b), and the window classifies as q-affine."""

    threshold = 1e-9
    trials = 500

    def measure(self, rng):
        worst = 0.0
        misclassified = 0
        for _ in range(self.trials):
            a, b = (float(v) for v in rng.uniform(-1.0, 1.0, 2))
            q = 3.0 * (1.0 - float(rng.random()))
            start = int(rng.integers(-20, 21))
            length = int(rng.integers(2, 41))
            p = make_affine(AffineRep(a=a, b=b, q=q, start=start), start + length)
            if classify(p, q).verdict is not Verdict.Q_AFFINE:
                misclassified += 1
                continue
            rep = affine_coeffs(p, q)
            scale = max(abs(a), abs(b), 1e-300)
            worst = max(worst, abs(rep.a - a) / scale, abs(rep.b - b) / scale)
        if misclassified:
            return math.inf, self.trials, f"{misclassified} windows not classified as q-affine"
        return worst, self.trials, "q in (0, 3], windows up to 40"


class SineSequenceExactness(BaseCheck):
    """The sine sequence on {0..d} has max chord ratio cos(pi/d)."""

    threshold = 1e-12

    def measure(self, rng):
        worst = 0.0
        for d in range(3, 51):
            top = float(chord_ratios(sine_sequence(0, d)).max())
            worst = max(worst, abs(top - math.cos(math.pi / d)))
        return worst, 48, "m - n in 3..50"


class EnvelopeReconstruction(BaseCheck):
    """Random positive sequences equal the pointwise minimum of their q-affine envelope, which dominates them."""

    threshold = 1e-9
    trials = 200

    def measure(self, rng):
        worst = 0.0
        for _ in range(self.trials):
            d = int(rng.integers(2, 21))
            values = rng.uniform(0.1, 2.0, d + 1)
            values[0], values[-1] = rng.uniform(0.0, 1.0, 2)
            p = WindowSequence(start=int(rng.integers(-5, 6)), values=values)
            q = float(chord_ratios(p).max())
            members = materialize_envelope(affine_envelope(p, q), p.start, p.end)
            scale = 1.0 + np.abs(p.values)
            gap = np.abs(pointwise_min(members).values - p.values) / scale
            shortfall = max(float(np.max((p.values - m.values) / scale)) for m in members)
            worst = max(worst, float(gap.max()), shortfall)
        return worst, self.trials, "q = max chord ratio"

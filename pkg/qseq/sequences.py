"""Finite sequences on integer windows and their q-convexity structure.

A sequence lives on ``{n, ..., m}`` with ``m - n >= 2``. It is q-convex when
``2 q p_i <= p_{i-1} + p_{i+1}`` at every interior index, q-concave when the
reverse holds and q-affine when both do. q-affine sequences are exactly
``a U_{i-n}(q) + b T_{i-n}(q)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from .chebyshev import cheb_t, cheb_u
from .config import CHORD_DENOMINATOR_FLOOR, tolerance
from .errors import DomainError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WindowSequence:
    """Real values ``p_start, ..., p_end`` indexed by their window position."""

    start: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 3:
            raise DomainError(f"a window needs m - n >= 2, got {arr.size} values")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sequence values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_values(cls, values: Iterable[float], start: int = 0) -> "WindowSequence":
        return cls(start=start, values=np.asarray(list(values), dtype=float))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WindowSequence":
        if isinstance(data, WindowSequence):
            return data
        if not isinstance(data, dict):
            raise TypeError("Sequence must be a JSON object with 'start' and 'values'")
        if "values" not in data:
            raise DomainError("Sequence object is missing 'values'")
        return cls.from_values(data["values"], int(data.get("start", 0)))

    def to_dict(self) -> Dict[str, Any]:
        return {"start": self.start, "values": [float(v) for v in self.values]}

    @property
    def end(self) -> int:
        return self.start + self.values.size - 1

    @property
    def length(self) -> int:
        return self.end - self.start

    @property
    def indices(self) -> range:
        return range(self.start, self.end + 1)

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1]

    def __getitem__(self, i: int) -> float:
        if not self.start <= i <= self.end:
            raise DomainError(f"index {i} outside window {{{self.start}..{self.end}}}")
        return float(self.values[i - self.start])

    def __len__(self) -> int:
        return self.values.size

    def same_window(self, other: "WindowSequence") -> bool:
        return self.start == other.start and self.end == other.end

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowSequence):
            return NotImplemented
        return self.same_window(other) and bool(np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"WindowSequence(start={self.start}, values={self.values.tolist()!r})"


class Verdict(str, Enum):
    Q_CONVEX = "QConvex"
    Q_CONCAVE = "QConcave"
    Q_AFFINE = "QAffine"
    NEITHER = "Neither"


@dataclass(frozen=True)
class Classification:
    q: float
    verdict: Verdict
    convexity_threshold: float | None
    concavity_threshold: float | None

    @property
    def is_concave(self) -> bool:
        return self.verdict in (Verdict.Q_CONCAVE, Verdict.Q_AFFINE)

    @property
    def is_convex(self) -> bool:
        return self.verdict in (Verdict.Q_CONVEX, Verdict.Q_AFFINE)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "verdict": self.verdict.value,
            "convexity_threshold": self.convexity_threshold,
            "concavity_threshold": self.concavity_threshold,
        }


@dataclass(frozen=True)
class AffineRep:
    """Coefficients of ``p_i = a U_{i-start}(q) + b T_{i-start}(q)``.

    The formula holds for every integer ``i``, so a representation may be
    evaluated on any window, including indices left of ``start``.
    """

    a: float
    b: float
    q: float
    start: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("affine coefficients must be finite")
        if not (math.isfinite(self.q) and self.q > 0.0):
            raise DomainError(f"q must be positive, got {self.q!r}")

    def value(self, i: int) -> float:
        k = i - self.start
        return self.a * cheb_u(k, self.q) + self.b * cheb_t(k, self.q)

    def evaluate(self, n: int, m: int) -> WindowSequence:
        return WindowSequence.from_values((self.value(i) for i in range(n, m + 1)), n)

    def materialize(self, end: int) -> WindowSequence:
        return make_affine(self, end)

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b, "q": self.q, "start": self.start}


@dataclass(frozen=True)
class ThreeTermCheck:
    lhs: float
    rhs: float
    condition_met: bool
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "condition_met": self.condition_met, "holds": self.holds}


@dataclass(frozen=True)
class SymmetricCheck:
    lhs: float
    rhs: float
    condition_met: bool
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "condition_met": self.condition_met, "holds": self.holds}


def _check_q(q: float) -> None:
    if not (math.isfinite(q) and q > 0.0):
        raise DomainError(f"q must be a positive finite number, got {q!r}")


def _slack(*terms: float) -> float:
    return tolerance() * (1.0 + sum(abs(t) for t in terms))


def chord_ratios(p: WindowSequence) -> np.ndarray:
    """``(p_{i-1} + p_{i+1}) / (2 p_i)`` for every interior index, in order."""

    interior = p.interior
    if np.any(interior <= 0.0):
        bad = p.start + 1 + int(np.argmax(interior <= 0.0))
        raise DomainError(f"chord ratios need a positive interior; p_{bad} <= 0")
    return (p.values[:-2] + p.values[2:]) / (2.0 * interior)


def classify(p: WindowSequence, q: float) -> Classification:
    _check_q(q)
    v = p.values
    left, mid, right = v[:-2], v[1:-1], v[2:]
    slack = tolerance() * (1.0 + np.abs(left) + np.abs(right) + 2.0 * q * np.abs(mid))
    outer = left + right
    inner = 2.0 * q * mid
    convex = bool(np.all(inner <= outer + slack))
    concave = bool(np.all(outer <= inner + slack))
    if convex and concave:
        verdict = Verdict.Q_AFFINE
    elif convex:
        verdict = Verdict.Q_CONVEX
    elif concave:
        verdict = Verdict.Q_CONCAVE
    else:
        verdict = Verdict.NEITHER

    low = high = None
    if np.all(mid > 0.0):
        ratios = chord_ratios(p)
        low, high = float(ratios.min()), float(ratios.max())
    return Classification(q=q, verdict=verdict, convexity_threshold=low, concavity_threshold=high)


def make_affine(rep: AffineRep, end: int) -> WindowSequence:
    if end - rep.start < 2:
        raise DomainError(f"window {{{rep.start}..{end}}} is too short; need m - n >= 2")
    return rep.evaluate(rep.start, end)


def affine_coeffs(p: WindowSequence, q: float) -> AffineRep:
    """Recover ``(a, b)`` of a q-affine sequence from its first two values."""

    _check_q(q)
    verdict = classify(p, q).verdict
    if verdict is not Verdict.Q_AFFINE:
        raise PreconditionError(f"sequence is not {q}-affine (verdict {verdict.value})")
    first = p.values[0]
    second_over_q = p.values[1] / q
    return AffineRep(a=second_over_q - first, b=2.0 * first - second_over_q, q=q, start=p.start)


def three_term_inequality(p: WindowSequence, q: float, i: int, j: int, k: int) -> ThreeTermCheck:
    """``U_{k-j-1}(q) p_i + U_{j-i-1}(q) p_k <= U_{k-i-1}(q) p_j`` for a triple ``i < j < k``."""

    if not (p.start <= i < j < k <= p.end):
        raise DomainError(f"need {p.start} <= i < j < k <= {p.end}, got ({i}, {j}, {k})")
    lhs_i = cheb_u(k - j - 1, q) * p[i]
    lhs_k = cheb_u(j - i - 1, q) * p[k]
    lhs = lhs_i + lhs_k
    rhs = cheb_u(k - i - 1, q) * p[j]
    condition = q >= math.cos(math.pi / max(j - i, k - j))
    return ThreeTermCheck(lhs=lhs, rhs=rhs, condition_met=condition, holds=lhs <= rhs + _slack(lhs_i, lhs_k, rhs))


def symmetric_inequality(p: WindowSequence, q: float, i: int, j: int) -> SymmetricCheck:
    """``p_{i-j} + p_{i+j} <= 2 T_j(q) p_i`` around an interior index."""

    if not (p.start < i < p.end):
        raise DomainError(f"i = {i} is not interior to {{{p.start}..{p.end}}}")
    reach = min(i - p.start, p.end - i)
    if not 1 <= j <= reach:
        raise DomainError(f"j must lie in 1..{reach}, got {j}")
    lhs = p[i - j] + p[i + j]
    rhs = 2.0 * cheb_t(j, q) * p[i]
    condition = q > math.cos(math.pi / j)
    return SymmetricCheck(lhs=lhs, rhs=rhs, condition_met=condition, holds=lhs <= rhs + _slack(p[i - j], p[i + j], rhs))


def _chord_values(p: WindowSequence, q: float, j: int, k: int) -> np.ndarray:
    denominator = cheb_u(k - j - 1, q)
    if denominator <= CHORD_DENOMINATOR_FLOOR:
        raise PreconditionError(f"U_{k - j - 1}({q}) = {denominator!r} is not positive")
    pj, pk = p[j], p[k]
    return np.array(
        [(pk * cheb_u(i - j - 1, q) + pj * cheb_u(k - i - 1, q)) / denominator for i in p.indices]
    )


def support_chord(p: WindowSequence, q: float, j: int, k: int) -> WindowSequence:
    """The q-affine sequence through ``(j, p_j)`` and ``(k, p_k)``.

    It lies below ``p`` strictly between ``j`` and ``k`` and above it outside.
    """

    _check_q(q)
    if not (p.start <= j < k <= p.end):
        raise DomainError(f"need {p.start} <= j < k <= {p.end}, got ({j}, {k})")
    bound = math.cos(math.pi / (k - j))
    if not q > bound:
        raise PreconditionError(f"support chord needs q > cos(pi/{k - j}) = {bound!r}, got q = {q!r}")
    verdict = classify(p, q).verdict
    if verdict not in (Verdict.Q_CONCAVE, Verdict.Q_AFFINE):
        raise PreconditionError(f"support chord needs a {q}-concave sequence (verdict {verdict.value})")
    return WindowSequence(start=p.start, values=_chord_values(p, q, j, k))


def affine_envelope(p: WindowSequence, q: float) -> List[AffineRep]:
    """One q-affine majorant per consecutive pair ``(j, j+1)``; their minimum is ``p``."""

    _check_q(q)
    if np.any(p.interior <= 0.0):
        raise PreconditionError("affine envelope needs a positive interior")
    top = float(chord_ratios(p).max())
    if q < top - tolerance() * (1.0 + abs(top)):
        raise PreconditionError(f"affine envelope needs q >= max chord ratio = {top!r}, got q = {q!r}")
    floor = math.cos(math.pi / p.length)
    if q < floor - tolerance():
        raise PreconditionError(f"affine envelope needs q >= cos(pi/{p.length}) = {floor!r}, got q = {q!r}")

    members: List[AffineRep] = []
    for j in range(p.start, p.end):
        first = p[j]
        second_over_q = p[j + 1] / q
        members.append(AffineRep(a=second_over_q - first, b=2.0 * first - second_over_q, q=q, start=j))
    logger.debug("built %d envelope members at q=%r", len(members), q)
    return members


def materialize_envelope(members: Sequence[AffineRep], n: int, m: int) -> List[WindowSequence]:
    return [rep.evaluate(n, m) for rep in members]


def _same_window(ps: Sequence[WindowSequence]) -> None:
    if not ps:
        raise DomainError("need at least one sequence")
    head = ps[0]
    for other in ps[1:]:
        if not head.same_window(other):
            raise DomainError(
                f"window mismatch: {{{head.start}..{head.end}}} vs {{{other.start}..{other.end}}}"
            )


def pointwise_min(ps: Sequence[WindowSequence]) -> WindowSequence:
    _same_window(ps)
    return WindowSequence(start=ps[0].start, values=np.min([p.values for p in ps], axis=0))


def pointwise_max(ps: Sequence[WindowSequence]) -> WindowSequence:
    _same_window(ps)
    return WindowSequence(start=ps[0].start, values=np.max([p.values for p in ps], axis=0))


def nonnegative_combination(ps: Sequence[WindowSequence], coeffs: Sequence[float]) -> WindowSequence:
    _same_window(ps)
    weights = np.asarray(coeffs, dtype=float)
    if weights.shape != (len(ps),):
        raise DomainError("need exactly one coefficient per sequence")
    if np.any(weights < 0.0):
        raise DomainError("coefficients must be nonnegative")
    return WindowSequence(start=ps[0].start, values=weights @ np.array([p.values for p in ps]))


def sine_sequence(n: int, m: int) -> WindowSequence:
    """``sin((i - n) pi / (m - n))`` on ``{n..m}`` with exact zero endpoints."""

    d = m - n
    if d < 2:
        raise DomainError(f"window {{{n}..{m}}} is too short; need m - n >= 2")
    values = np.sin(np.arange(d + 1) * math.pi / d)
    values[0] = values[-1] = 0.0
    return WindowSequence(start=n, values=values)

"""Power means of chord ratios and the constants that bound them from below.

For an admissible sequence (nonnegative endpoints, positive interior) and a
mean ``M`` of ``m - n - 1`` variables, ``C_M`` is the largest constant with
``C_M <= M(chord ratios of p)``. It is known exactly for the arithmetic,
geometric and maximum means; for other positive exponents only lower bounds
are available.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable

import numpy as np

from .config import tolerance
from .errors import DomainError, UnsupportedError
from .sequences import WindowSequence, chord_ratios, sine_sequence

logger = logging.getLogger(__name__)

_ALIASES = {
    "inf": math.inf,
    "+inf": math.inf,
    "max": math.inf,
    "-inf": -math.inf,
    "min": -math.inf,
    "a": 1.0,
    "arithmetic": 1.0,
    "g": 0.0,
    "geometric": 0.0,
}


@dataclass(frozen=True)
class MeanSpec:
    """Selects the power mean ``H_r``; ``r`` may be ``-inf``, ``0`` or ``+inf``."""

    exponent: float

    def __post_init__(self) -> None:
        r = float(self.exponent)
        if math.isnan(r):
            raise DomainError("mean exponent must not be NaN")
        object.__setattr__(self, "exponent", r)

    @classmethod
    def parse(cls, text: "str | float | MeanSpec") -> "MeanSpec":
        if isinstance(text, MeanSpec):
            return text
        if isinstance(text, (int, float)):
            return cls(float(text))
        key = str(text).strip().lower()
        if key in _ALIASES:
            return cls(_ALIASES[key])
        try:
            return cls(float(key))
        except ValueError as exc:
            raise DomainError(f"Unrecognised mean exponent {text!r}") from exc

    @property
    def label(self) -> str:
        r = self.exponent
        if r == math.inf:
            return "max"
        if r == -math.inf:
            return "min"
        if r == 1.0:
            return "arithmetic"
        if r == 0.0:
            return "geometric"
        return f"power({r:g})"

    def serialize(self) -> "float | str":
        if math.isinf(self.exponent):
            return "inf" if self.exponent > 0 else "-inf"
        return self.exponent

    def __call__(self, u: Iterable[float]) -> float:
        return power_mean(self, u)


class BoundSource(str, Enum):
    ARITHMETIC_EXACT = "ArithmeticExact"
    GEOMETRIC_EXACT = "GeometricExact"
    MAX_EXACT = "MaxExact"
    POWER_LOWER = "PowerLower"
    POWER_LOWER_ODD = "PowerLowerOdd"


@dataclass(frozen=True)
class BoundReport:
    value: float
    exact: bool
    source: BoundSource

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "exact": self.exact, "source": self.source.value}


@dataclass(frozen=True)
class LowerBounds:
    primary: float
    secondary: float
    odd_bonus: float | None
    best: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "primary": self.primary,
            "secondary": self.secondary,
            "odd_bonus": self.odd_bonus,
            "best": self.best,
        }


@dataclass(frozen=True)
class CosineBound:
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def _mean(r: float, u: np.ndarray) -> float:
    # Accepts zero entries as limits; callers decide whether zeros are allowed.
    if r == math.inf:
        return float(u.max())
    if r == -math.inf:
        return float(u.min())
    if abs(r) < 1e-200:
        # indistinguishable from the geometric mean; r * log(u) would be subnormal
        r = 0.0
    if np.any(u == 0.0) and r <= 0.0:
        return 0.0
    if r == 0.0:
        return float(np.exp(np.mean(np.log(u))))
    if r == 1.0:
        return float(np.mean(u))
    scale = float(u.max()) if r > 0 else float(u.min())
    if scale == 0.0:
        return 0.0
    # expm1/log1p keep tiny |r| close to the geometric limit
    with np.errstate(divide="ignore"):
        logs = np.log(u / scale)
    return scale * math.exp(math.log1p(float(np.mean(np.expm1(r * logs)))) / r)


def power_mean(spec: MeanSpec, u: Iterable[float]) -> float:
    values = np.asarray(list(u), dtype=float)
    if values.size == 0:
        raise DomainError("power mean of an empty array")
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise DomainError("power mean needs positive finite entries")
    return _mean(spec.exponent, values)


def _check_r(r: float) -> None:
    if not (math.isfinite(r) and r > 0.0):
        raise DomainError(f"r must be a positive finite number, got {r!r}")


def f_rk(r: float, u: Iterable[float]) -> float:
    """``u_1^r + sum_i (1/u_i + u_{i+1})^r + u_k^{-r}``."""

    _check_r(r)
    x = np.asarray(list(u), dtype=float)
    if x.size == 0 or not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError("F needs a nonempty array of positive entries")
    middle = np.sum((1.0 / x[:-1] + x[1:]) ** r)
    return float(x[0] ** r + middle + x[-1] ** (-r))


def _exp(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def f_lower_bound(r: float, k: int) -> LowerBounds:
    _check_r(r)
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if k == 1:
        primary = 2.0
    elif r <= 1.0:
        primary = 2.0 * 2.0 ** ((r + 1.0) / 2.0) + (k - 2) * 2.0**r
    else:
        edge = 2.0 ** ((1.0 - r) / (2.0 * r))
        primary = _exp(r * math.log(2.0) + (1.0 - r) * math.log(k) + r * math.log(2.0 * edge + (k - 2)))
    secondary = _exp(math.log(k) + (r + (1.0 - r) / k) * math.log(2.0))
    odd_bonus = float(k + 1) if k % 2 else None
    best = max(b for b in (primary, secondary, odd_bonus) if b is not None)
    return LowerBounds(primary=primary, secondary=secondary, odd_bonus=odd_bonus, best=best)


def f_rk_sharp_point(r: float, k: int) -> np.ndarray:
    """A point where ``f_rk`` attains ``f_lower_bound(r, k).best``."""

    _check_r(r)
    if k == 1 or r == 1.0:
        return np.ones(k)
    if k == 2:
        return np.array([2.0 ** ((r - 1.0) / (2.0 * r)), 2.0 ** ((1.0 - r) / (2.0 * r))])
    raise UnsupportedError(f"no known minimiser of F for r={r!r}, k={k}")


def _window_length(n: int, m: int) -> int:
    d = m - n
    if d < 2:
        raise DomainError(f"window {{{n}..{m}}} is too short; need m - n >= 2")
    return d


def c_constant(spec: MeanSpec, n: int, m: int) -> BoundReport:
    d = _window_length(n, m)
    r = spec.exponent
    if r == math.inf:
        return BoundReport(math.cos(math.pi / d), True, BoundSource.MAX_EXACT)
    if r == 1.0:
        return BoundReport((d - 2) / (d - 1), True, BoundSource.ARITHMETIC_EXACT)
    if r == 0.0:
        return BoundReport((1 + (-1) ** (d - 1)) / 4.0, True, BoundSource.GEOMETRIC_EXACT)
    if r < 0.0:
        raise UnsupportedError(f"constants are only known for r > 0, got {spec.label}")

    if d == 2:
        # a single ratio, which vanishes at (0, 1, 0)
        return BoundReport(0.0, True, BoundSource.POWER_LOWER)
    if d == 3:
        return BoundReport(0.5, True, BoundSource.POWER_LOWER)
    if r <= 1.0:
        edge = 2.0 ** ((1.0 - r) / 2.0)
        value = ((2.0 * edge + (d - 4)) / (d - 1)) ** (1.0 / r)
    else:
        edge = 2.0 ** ((1.0 - r) / (2.0 * r))
        value = ((d - 2) / (d - 1)) ** (1.0 / r) * (2.0 * edge + (d - 4)) / (d - 2)
    report = BoundReport(value, d == 4, BoundSource.POWER_LOWER)
    if d % 2 and value < 0.5:
        report = BoundReport(0.5, False, BoundSource.POWER_LOWER_ODD)
    return report


def mean_of_chord_ratios(spec: MeanSpec, p: WindowSequence) -> float:
    if p.values[0] < 0.0 or p.values[-1] < 0.0:
        raise DomainError("endpoints must be nonnegative")
    return _mean(spec.exponent, chord_ratios(p))


def is_sharp_witness(spec: MeanSpec, n: int, m: int) -> bool:
    _window_length(n, m)
    return spec.exponent in (0.0, 1.0, math.inf)


def sharpness_witness(spec: MeanSpec, n: int, m: int, epsilon: float = 1e-3) -> WindowSequence:
    """A sequence whose chord-ratio mean attains (or approaches as epsilon -> 0) ``C_M``."""

    d = _window_length(n, m)
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    r = spec.exponent
    if r < 0.0:
        raise UnsupportedError(f"no witness for {spec.label}")
    if r == 1.0:
        values = np.ones(d + 1)
        values[0] = values[-1] = 0.0
        return WindowSequence(start=n, values=values)
    if r == 0.0:
        offsets = np.arange(d + 1)
        if d % 2 == 0:
            values = np.where(offsets % 2 == 0, epsilon, 1.0)
        else:
            exponents = np.where(offsets % 2 == 0, (d - offsets - 1) / 2.0, (offsets - 1) / 2.0)
            values = epsilon**exponents
        return WindowSequence(start=n, values=values)
    if r != math.inf:
        logger.debug("no sharp witness for %s; using the sine sequence", spec.label)
    return sine_sequence(n, m)


def cosine_bound_check(m: int) -> CosineBound:
    """``(m - 4 + sqrt 2) / (m - 2) <= cos(pi / m)``, with equality at ``m = 4``."""

    if m < 3:
        raise DomainError(f"need m >= 3, got {m}")
    lhs = (m - 4 + math.sqrt(2.0)) / (m - 2)
    rhs = math.cos(math.pi / m)
    return CosineBound(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tolerance() * (1.0 + abs(rhs)))

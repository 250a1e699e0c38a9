"""Chebyshev polynomials of the first and second kind for every integer order.

Orders up to ``RECURRENCE_LIMIT`` in absolute value at ``|x| <= CLOSED_FORM_ABS``
are evaluated with the three-term recurrence ``P_{k+1} = 2x P_k - P_{k-1}``;
everything else uses the closed forms ``T_k(cos u) = cos(ku)``,
``T_k(cosh u) = cosh(ku)`` and the matching sine/sinh quotients for ``U_k``. Negative orders are reduced with
``T_{-k} = T_k`` and ``U_{-k} = -U_{k-2}`` before anything is evaluated, so
reflections hold bit for bit. Values past the float range saturate to +-inf.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from .config import ATOL, CLOSED_FORM_ABS, RECURRENCE_LIMIT, RTOL, TAU_SNAP
from .errors import DomainError

logger = logging.getLogger(__name__)


class ChebKind(str, Enum):
    FIRST = "T"
    SECOND = "U"

    @classmethod
    def parse(cls, value: "str | ChebKind") -> "ChebKind":
        if isinstance(value, ChebKind):
            return value
        key = str(value).strip().upper()
        if key in ("T", "FIRST", "FIRSTKIND", "1"):
            return cls.FIRST
        if key in ("U", "SECOND", "SECONDKIND", "2"):
            return cls.SECOND
        raise DomainError(f"Unknown Chebyshev kind {value!r}; expected 'T' or 'U'")


@dataclass(frozen=True)
class ChebEval:
    """A single evaluation request together with its value."""

    kind: ChebKind
    order: int
    argument: float

    def __post_init__(self) -> None:
        _check_finite(self.argument)

    def value(self) -> float:
        return cheb(self.kind, self.order, self.argument)

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "order": self.order,
            "x": self.argument,
            "value": self.value(),
        }


def _check_finite(x: float) -> None:
    if not math.isfinite(x):
        raise DomainError(f"Chebyshev argument must be finite, got {x!r}")


def _recurrence(k: int, x: float, first: float) -> float:
    # P_0 = 1, P_1 = first (x for T, 2x for U)
    if k == 0:
        return 1.0
    prev, cur = 1.0, first
    two_x = 2.0 * x
    for _ in range(k - 1):
        prev, cur = cur, two_x * cur - prev
    return cur


def _use_recurrence(k: int, x: float) -> bool:
    return k <= RECURRENCE_LIMIT and abs(x) <= CLOSED_FORM_ABS


def _hyperbolic(k: int, x: float, second: bool) -> float:
    """``T_k(x)`` or ``U_k(x)`` for ``|x| > 1`` and ``k >= 0``, saturating to +-inf."""

    u = math.acosh(abs(x))
    sign = -1.0 if (x < 0 and k % 2) else 1.0
    try:
        value = math.sinh((k + 1) * u) / math.sinh(u) if second else math.cosh(k * u)
    except OverflowError:
        # log of the same quotient with the large exponentials factored out
        if second:
            log_value = k * u + math.log1p(-math.exp(-2.0 * (k + 1) * u)) - math.log1p(-math.exp(-2.0 * u))
        else:
            log_value = k * u + math.log1p(math.exp(-2.0 * k * u)) - math.log(2.0)
        try:
            value = math.exp(log_value)
        except OverflowError:
            value = math.inf
    return sign * value


def cheb_t(k: int, x: float) -> float:
    """Return ``T_k(x)``; values beyond the float range come back as ``+-inf``."""

    _check_finite(x)
    k = abs(int(k))
    if _use_recurrence(k, x):
        return _recurrence(k, x, x)
    logger.debug("T_%d(%r) via closed form", k, x)
    if abs(x) <= 1.0:
        return math.cos(k * math.acos(x))
    return _hyperbolic(k, x, second=False)


def cheb_u(k: int, x: float) -> float:
    """Return ``U_k(x)``; values beyond the float range come back as ``+-inf``."""

    _check_finite(x)
    k = int(k)
    if k == -1:
        return 0.0
    if k < -1:
        return -cheb_u(-k - 2, x)
    if _use_recurrence(k, x):
        return _recurrence(k, x, 2.0 * x)
    # limits of the sine quotient; the only points where sin(arccos x) vanishes
    if x == 1.0:
        return float(k + 1)
    if x == -1.0:
        return float(k + 1) if k % 2 == 0 else -float(k + 1)
    logger.debug("U_%d(%r) via closed form", k, x)
    if abs(x) < 1.0:
        u = math.acos(x)
        return math.sin((k + 1) * u) / math.sin(u)
    return _hyperbolic(k, x, second=True)


def cheb(kind: "ChebKind | str", k: int, x: float) -> float:
    if ChebKind.parse(kind) is ChebKind.FIRST:
        return cheb_t(k, x)
    return cheb_u(k, x)


def cheb_values(kind: "ChebKind | str", k_max: int, x: float) -> np.ndarray:
    """Return the orders ``0..k_max`` of one kind at ``x`` as an array."""

    _check_finite(x)
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    kind = ChebKind.parse(kind)
    out = np.empty(k_max + 1, dtype=float)
    out[0] = 1.0
    if k_max >= 1:
        out[1] = x if kind is ChebKind.FIRST else 2.0 * x
    for k in range(1, k_max):
        nxt = 2.0 * x * float(out[k]) - float(out[k - 1])
        if not math.isfinite(nxt):
            # past the float range the recurrence turns into inf - inf
            single = cheb_t if kind is ChebKind.FIRST else cheb_u
            out[k + 1 :] = [single(j, x) for j in range(k + 1, k_max + 1)]
            break
        out[k + 1] = nxt
    return out


def largest_root_t(k: int) -> float:
    """Largest root of ``T_k`` for ``k >= 1``."""

    if k < 1:
        raise DomainError(f"T_{k} has no largest root; need k >= 1")
    return math.cos(math.pi / (2 * k))


def largest_root_u(k: int) -> float:
    """Largest root of ``U_k`` for ``k >= 1``."""

    if k < 1:
        raise DomainError(f"U_{k} has no largest root; need k >= 1")
    return math.cos(math.pi / (k + 1))


def tau(x: float) -> int:
    """Last index through which ``T_1(x), T_2(x), ...`` keeps strictly decreasing."""

    if not (0.0 <= x < 1.0):
        raise DomainError(f"tau needs 0 <= x < 1, got {x!r}")
    value = math.pi / math.acos(x)
    nearest = round(value)
    if abs(value - nearest) <= TAU_SNAP:
        return int(nearest)
    return math.floor(value)


@dataclass(frozen=True)
class IdentityResiduals:
    """Left-minus-right residuals of the product and sum identities at one point."""

    idU_u: float
    idU_t: float
    ut_u: float
    ut_t: float
    ut1: float
    ut2: float
    magnitude: float

    def residuals(self) -> Tuple[float, ...]:
        return (self.idU_u, self.idU_t, self.ut_u, self.ut_t, self.ut1, self.ut2)

    def worst(self) -> float:
        return max(abs(r) for r in self.residuals())

    def within(self, atol: float = ATOL, rtol: float = RTOL) -> bool:
        return self.worst() <= atol + rtol * self.magnitude

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def identity_residuals(i: int, j: int, k: int, q: float) -> IdentityResiduals:
    _check_finite(q)
    U = lambda n: cheb_u(n, q)  # noqa: E731
    T = lambda n: cheb_t(n, q)  # noqa: E731

    terms = {
        "idU_u": (U(k - j - 1) * U(i), U(j - i - 1) * U(k), U(k - i - 1) * U(j)),
        "idU_t": (U(k - j - 1) * T(i), U(j - i - 1) * T(k), U(k - i - 1) * T(j)),
        "ut_u": (U(i - j), U(i + j), 2.0 * T(j) * U(i)),
        "ut_t": (T(i - j), T(i + j), 2.0 * T(j) * T(i)),
        "ut1": (U(i + j), -U(i - j), 2.0 * T(i + 1) * U(j - 1)),
        "ut2": (T(j - i), -T(j + i), 2.0 * (1.0 - q * q) * U(j - 1) * U(i - 1)),
    }
    magnitude = max(abs(t) for triple in terms.values() for t in triple)
    residuals = {name: (a + b) - c for name, (a, b, c) in terms.items()}
    return IdentityResiduals(magnitude=magnitude, **residuals)


def alternating_sine_sums(xs: Sequence[float]) -> Tuple[float, float]:
    """Both cyclic alternating-sine sums for an odd number of angles; each vanishes."""

    x = np.asarray(xs, dtype=float)
    n = x.size
    if n == 0 or n % 2 == 0:
        raise DomainError(f"alternating sine sums need an odd number of angles, got {n}")
    if not np.all(np.isfinite(x)):
        raise DomainError("angles must be finite")
    # y_i = sum_{j=1}^{n-1} (-1)^j x_{i+j}, indices taken cyclically
    y = np.zeros(n)
    for j in range(1, n):
        y += (-1.0) ** j * np.roll(x, -j)
    s = np.sin(y)
    return float(np.sum(s * np.sin(x))), float(np.sum(s * np.cos(x)))

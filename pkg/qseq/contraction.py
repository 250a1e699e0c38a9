"""The min-of-averages operator, its weighted max norm and a certified fixed-point solver.

For ``gamma`` of length ``floor((n + 1) / 2)`` the operator maps ``a`` in R^n to

    T(a)_i = min_{1 <= j <= min(i, n + 1 - i)} ((a_{i-j} + a_{i+j}) / 2 + gamma_j)

with ``a_0 = a_{n+1} = 0``. With positive weights ``p`` and
``q = max_i (p_{i-1} + p_{i+1}) / (2 p_i)`` (weights zero-extended the same
way) the operator is ``q*``-Lipschitz in ``||a||_p = max_i |a_i| / p_i``.
"""

from __future__ import annotations

import copy
import itertools
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .chebyshev import cheb_t
from .config import tolerance
from .errors import ConvergenceError, DomainError, NotContractionError, PreconditionError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 200_000

# Named problems shared by the CLI and the verification sweep.
PROBLEM_PRESETS: Dict[str, Dict[str, Any]] = {
    "single": {"n": 1, "gamma": [5.0], "weights": "default"},
    "pair": {"n": 2, "gamma": [1.0], "weights": "default"},
    "triple": {"n": 3, "gamma": [0.0, -1.0], "weights": "default"},
    "arch-7": {
        "n": 7,
        "gamma": [0.5, -0.25, 1.0, 0.0],
        "weights": [1.0, 1.8, 2.4, 2.6, 2.4, 1.8, 1.0],
    },
}

DEFAULT_PROBLEM_PRESET = "triple"


def clone_problem_config(config: Dict[str, Any]) -> Dict[str, Any]:
    return copy.deepcopy(config)


def resolve_problem_config(spec: Any) -> Dict[str, Any] | None:
    """Normalize a problem configuration reference.

    Accepts dictionaries, preset names, JSON strings or paths to JSON files.
    Returns a copy of the resolved configuration or ``None`` if ``spec`` is falsy.
    """

    if spec in (None, "", False):
        return None
    if isinstance(spec, dict):
        return clone_problem_config(spec)
    if isinstance(spec, str):
        value = spec.strip()
        if not value:
            return None
        preset = PROBLEM_PRESETS.get(value) or PROBLEM_PRESETS.get(value.lower())
        if preset is not None:
            return clone_problem_config(preset)
        if not value.startswith("{") and os.path.isfile(value):
            with open(value, encoding="utf-8") as f:
                value = f.read()
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError as exc:
            raise ValueError(f"Invalid problem configuration: {exc}") from exc
        if not isinstance(parsed, dict):
            raise ValueError("Problem configuration JSON must decode to an object")
        return clone_problem_config(parsed)
    raise TypeError("Problem configuration must be a dict, preset name, JSON string or file path")


def default_weights(n: int) -> np.ndarray:
    """``i (n + 1 - i)`` for ``i = 1..n``; a strictly concave positive arch."""

    if n < 1:
        raise DomainError(f"dimension must be at least 1, got {n}")
    i = np.arange(1, n + 1, dtype=float)
    return i * (n + 1 - i)


@dataclass(frozen=True, eq=False)
class ContractionProblem:
    dimension: int
    gamma: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        n = int(self.dimension)
        if n < 1:
            raise DomainError(f"dimension must be at least 1, got {n}")
        gamma = np.array(self.gamma, dtype=float).reshape(-1)
        if gamma.size != (n + 1) // 2:
            raise DomainError(f"gamma must have {(n + 1) // 2} entries for n = {n}, got {gamma.size}")
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.size != n:
            raise DomainError(f"weights must have {n} entries, got {weights.size}")
        if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(weights))):
            raise DomainError("gamma and weights must be finite")
        if np.any(weights <= 0.0):
            raise DomainError("weights must be positive")
        gamma.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "dimension", n)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "ContractionProblem":
        if isinstance(config, ContractionProblem):
            return config
        if not isinstance(config, dict):
            raise TypeError("Problem configuration must be a dict or ContractionProblem instance")
        cfg = dict(config)
        if "gamma" not in cfg:
            raise DomainError("Problem configuration is missing 'gamma'")
        gamma = [float(v) for v in cfg.pop("gamma")]
        # without "n" the odd dimension matching len(gamma) is assumed
        n = int(cfg.pop("n", 2 * len(gamma) - 1))
        weights = cfg.pop("weights", "default")
        if cfg:
            raise DomainError(f"Unknown problem key(s): {', '.join(sorted(map(str, cfg)))}; expected n, gamma, weights")
        if weights in (None, "default"):
            weights = default_weights(n)
        return cls(dimension=n, gamma=np.asarray(gamma), weights=np.asarray(weights, dtype=float))

    def to_config(self) -> Dict[str, Any]:
        return {
            "n": self.dimension,
            "gamma": self.gamma.tolist(),
            "weights": self.weights.tolist(),
        }


def default_problem(n: int, gamma: Sequence[float]) -> ContractionProblem:
    return ContractionProblem(dimension=n, gamma=np.asarray(gamma, dtype=float), weights=default_weights(n))


@dataclass(frozen=True)
class ContractionCertificate:
    q: float
    q_star: float
    is_contraction: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.q, "q_star": self.q_star, "is_contraction": self.is_contraction}


@dataclass(frozen=True, eq=False)
class FixedPointResult:
    point: np.ndarray = field(repr=False)
    iterations: int
    residual_norm: float
    certificate: ContractionCertificate

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": [float(v) for v in self.point],
            "iterations": self.iterations,
            "residual": self.residual_norm,
            "q": self.certificate.q,
            "q_star": self.certificate.q_star,
        }


@lru_cache(maxsize=128)
def _branch_tables(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Rows are components i = 1..n, columns branches j = 1..floor((n+1)/2);
    # indices point into the zero-extended vector (a_0, ..., a_{n+1}).
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, (n + 1) // 2 + 1)[None, :]
    valid = j <= np.minimum(i, n + 1 - i)
    left = np.where(valid, i - j, 0)
    right = np.where(valid, i + j, 0)
    for table in (left, right, valid):
        table.setflags(write=False)
    return left, right, valid


def _as_vector(prob: ContractionProblem, a: Sequence[float]) -> np.ndarray:
    x = np.asarray(a, dtype=float).reshape(-1)
    if x.size != prob.dimension:
        raise DomainError(f"expected a vector of length {prob.dimension}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("vector entries must be finite")
    return x


def _branches(n: int, gamma: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Every branch value, shape ``x.shape + (J,)``; unavailable branches are ``inf``.

    ``x`` is one vector or a ``(batch, n)`` stack; ``gamma`` is ``(J,)`` or ``(batch, J)``.
    """

    left, right, valid = _branch_tables(n)
    ext = np.zeros(x.shape[:-1] + (n + 2,))
    ext[..., 1:-1] = x
    values = (ext[..., left] + ext[..., right]) / 2.0 + gamma[..., None, :]
    return np.where(valid, values, np.inf)


def _apply(prob: ContractionProblem, x: np.ndarray) -> np.ndarray:
    return _branches(prob.dimension, prob.gamma, x).min(axis=-1)


def apply_operator(prob: ContractionProblem, a: Sequence[float] | np.ndarray) -> np.ndarray:
    """``T(a)`` for one vector, or row by row for a ``(batch, n)`` array."""

    if np.ndim(a) == 2:
        x = np.asarray(a, dtype=float)
        if x.shape[1] != prob.dimension:
            raise DomainError(f"expected rows of length {prob.dimension}, got {x.shape[1]}")
        if not np.all(np.isfinite(x)):
            raise DomainError("vector entries must be finite")
        return _apply(prob, x)
    return _apply(prob, _as_vector(prob, a))


def weighted_norm(weights: Sequence[float], a: Sequence[float]) -> float:
    """``max_i |a_i| / p_i``."""

    w = np.asarray(weights, dtype=float).reshape(-1)
    x = np.asarray(a, dtype=float).reshape(-1)
    if w.size != x.size:
        raise DomainError(f"weights and vector differ in length ({w.size} vs {x.size})")
    if w.size == 0:
        raise DomainError("weighted norm of an empty vector")
    if np.any(w <= 0.0):
        raise DomainError("weights must be positive")
    return float(np.max(np.abs(x) / w))


def certificate(prob: ContractionProblem) -> ContractionCertificate:
    n = prob.dimension
    ext = np.zeros(n + 2)
    ext[1:-1] = prob.weights
    q = float(np.max((ext[:-2] + ext[2:]) / (2.0 * prob.weights)))
    q_star = q if q <= 1.0 else cheb_t((n + 1) // 2, q)
    return ContractionCertificate(q=q, q_star=q_star, is_contraction=q_star < 1.0)


def a_priori_iteration_bound(prob: ContractionProblem, first_step: float, tol: float) -> int:
    """Iterations the Banach estimate allows before the stopping rule must fire.

    ``first_step`` is ``||T(x0) - x0||_p``.
    """

    q_star = certificate(prob).q_star
    if q_star >= 1.0:
        raise NotContractionError(f"q* = {q_star!r} >= 1; no a-priori bound", certificate(prob))
    if q_star <= 0.0 or first_step <= 0.0:
        return 1
    ratio = first_step / (tol * (1.0 - q_star))
    if ratio <= 1.0:
        return 1
    return math.ceil(math.log(ratio) / math.log(1.0 / q_star)) + 1


def _prepare(prob: ContractionProblem, tol: float | None, max_iter: int) -> Tuple[float, ContractionCertificate]:
    if tol is None:
        tol = tolerance()
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be at least 1, got {max_iter}")
    cert = certificate(prob)
    if not cert.is_contraction:
        raise NotContractionError(
            f"weights give q* = {cert.q_star!r} >= 1; the operator is not certified to contract",
            cert,
        )
    return tol, cert


def _step_threshold(tol: float, q_star: float) -> float:
    # ||x_k - x_{k-1}|| <= tol (1 - q*) / q*  puts x_k within tol of x*
    return math.inf if q_star == 0.0 else tol * (1.0 - q_star) / q_star


def _iterate(
    prob: ContractionProblem, x: np.ndarray, tol: float, max_iter: int, cert: ContractionCertificate
) -> FixedPointResult:
    q_star = cert.q_star
    threshold = _step_threshold(tol, q_star)
    step = math.inf
    for iteration in range(1, max_iter + 1):
        nxt = _apply(prob, x)
        step = weighted_norm(prob.weights, nxt - x)
        x = nxt
        if step <= threshold:
            residual = weighted_norm(prob.weights, _apply(prob, x) - x)
            logger.info("fixed point after %d iterations (residual %.3g, q*=%.6g)", iteration, residual, q_star)
            return FixedPointResult(point=x, iterations=iteration, residual_norm=residual, certificate=cert)
        if iteration % 10_000 == 0:
            logger.debug("iteration %d: step %.3g (threshold %.3g)", iteration, step, threshold)

    residual = weighted_norm(prob.weights, _apply(prob, x) - x)
    best = FixedPointResult(point=x, iterations=max_iter, residual_norm=residual, certificate=cert)
    raise ConvergenceError(
        f"no certified fixed point after {max_iter} iterations (last step {step:.3g}, needed {threshold:.3g})",
        best,
    )


def _policy_system(prob: ContractionProblem, pattern: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Linear system ``(I - A) x = gamma_pattern`` of the piece where row ``i`` uses branch ``pattern[i]``."""

    n = prob.dimension
    rows = np.arange(n)
    matrix = np.eye(n)
    for cols in (rows + 1 - pattern, rows + 1 + pattern):
        inside = (cols >= 1) & (cols <= n)
        matrix[rows[inside], cols[inside] - 1] -= 0.5
    return matrix, prob.gamma[pattern - 1]


def _improve_policy(
    prob: ContractionProblem, x: np.ndarray, tol: float, max_iter: int, cert: ContractionCertificate
) -> FixedPointResult:
    # ||x - x*|| <= ||T(x) - x|| / (1 - q*) certifies any candidate, however it was found
    target = tol * (1.0 - cert.q_star)
    seen = set()
    for solves in range(max_iter + 1):
        branches = _branches(prob.dimension, prob.gamma, x)
        residual = weighted_norm(prob.weights, branches.min(axis=-1) - x)
        if residual <= target:
            logger.info("fixed point after %d policy solves (residual %.3g, q*=%.6g)", solves, residual, cert.q_star)
            return FixedPointResult(point=x, iterations=solves, residual_norm=residual, certificate=cert)
        if solves == max_iter:
            break
        pattern = branches.argmin(axis=-1) + 1
        key = pattern.tobytes()
        if key in seen:
            # rounding keeps the residual above target; plain iteration finishes from here
            logger.debug("branch pattern repeated after %d solves; iterating from the last candidate", solves)
            rest = _iterate(prob, x, tol, max_iter - solves, cert)
            return replace(rest, iterations=solves + rest.iterations)
        seen.add(key)
        x = np.linalg.solve(*_policy_system(prob, pattern))

    best = FixedPointResult(point=x, iterations=max_iter, residual_norm=residual, certificate=cert)
    raise ConvergenceError(
        f"no certified fixed point after {max_iter} policy solves (residual {residual:.3g}, needed {target:.3g})",
        best,
    )


SOLVE_METHODS = ("iterate", "policy")


def solve_fixed_point(
    prob: ContractionProblem,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    initial: Sequence[float] | None = None,
    method: str = "iterate",
) -> FixedPointResult:
    """Find the fixed point of ``T`` certified to ``||x - x*||_p <= tol``.

    ``"iterate"`` runs ``x <- T(x)`` until the step bound fires. ``"policy"`` solves
    the linear piece picked by the minimizing branches at the current candidate and
    repeats until the residual bound fires; ``iterations`` then counts linear solves.
    """

    if method not in SOLVE_METHODS:
        raise DomainError(f"unknown solve method {method!r}; expected one of {', '.join(SOLVE_METHODS)}")
    tol, cert = _prepare(prob, tol, max_iter)
    x = np.zeros(prob.dimension) if initial is None else _as_vector(prob, initial).copy()
    if method == "policy":
        return _improve_policy(prob, x, tol, max_iter, cert)
    return _iterate(prob, x, tol, max_iter, cert)


def solve_fixed_points(
    problems: Sequence[ContractionProblem],
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    initial: np.ndarray | None = None,
) -> List[FixedPointResult]:
    """Run the plain iteration for many problems sharing dimension and weights at once.

    Rows stop independently under the same step bound as ``solve_fixed_point``.
    ``initial`` is a ``(len(problems), n)`` array of starting points.
    """

    problems = list(problems)
    if not problems:
        raise DomainError("solve_fixed_points needs at least one problem")
    head = problems[0]
    n = head.dimension
    if any(p.dimension != n or not np.array_equal(p.weights, head.weights) for p in problems[1:]):
        raise DomainError("batched problems must share dimension and weights")
    tol, cert = _prepare(head, tol, max_iter)
    threshold = _step_threshold(tol, cert.q_star)

    gammas = np.stack([p.gamma for p in problems])
    if initial is None:
        x = np.zeros((len(problems), n))
    else:
        x = np.array(initial, dtype=float)
        if x.shape != (len(problems), n):
            raise DomainError(f"initial points must have shape {(len(problems), n)}, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("vector entries must be finite")
    weights = head.weights
    iterations = np.full(len(problems), max_iter)
    active = np.arange(len(problems))
    for iteration in range(1, max_iter + 1):
        current = x[active]
        nxt = _branches(n, gammas[active], current).min(axis=-1)
        steps = np.max(np.abs(nxt - current) / weights, axis=-1)
        x[active] = nxt
        done = steps <= threshold
        iterations[active[done]] = iteration
        active = active[~done]
        if active.size == 0:
            break

    residuals = np.max(np.abs(_branches(n, gammas, x).min(axis=-1) - x) / weights, axis=-1)
    results = [
        FixedPointResult(
            point=x[b].copy(), iterations=int(iterations[b]), residual_norm=float(residuals[b]), certificate=cert
        )
        for b in range(len(problems))
    ]
    if active.size:
        raise ConvergenceError(
            f"{active.size} of {len(problems)} problems uncertified after {max_iter} iterations",
            results[int(active[0])],
        )
    logger.info(
        "%d fixed points after at most %d iterations (q*=%.6g)", len(problems), int(iterations.max()), cert.q_star
    )
    return results


def branch_enumeration_fixed_point(prob: ContractionProblem, max_dimension: int = 6) -> np.ndarray:
    """Fixed point found by solving every linear piece of the operator.

    Each component picks an active branch ``j(i)``; the resulting linear system
    is solved and kept when every chosen branch attains its minimum.
    """

    n = prob.dimension
    if n > max_dimension:
        raise DomainError(f"branch enumeration is limited to n <= {max_dimension}, got {n}")
    choices = [range(1, min(i, n + 1 - i) + 1) for i in range(1, n + 1)]
    found: List[np.ndarray] = []
    for pattern in itertools.product(*choices):
        try:
            x = np.linalg.solve(*_policy_system(prob, np.array(pattern)))
        except np.linalg.LinAlgError:
            continue
        if np.all(np.abs(_apply(prob, x) - x) <= 1e-9 * (1.0 + np.abs(x))):
            found.append(x)
    if not found:
        raise PreconditionError("no branch pattern is self-consistent")
    if any(not np.allclose(found[0], other, rtol=1e-8, atol=1e-8) for other in found[1:]):
        logger.warning("branch enumeration found %d distinct fixed points", len(found))
    return found[0]


def empirical_lipschitz(
    prob: ContractionProblem,
    trials: int,
    scale: float = 1.0,
    rng: np.random.Generator | None = None,
) -> float:
    """Largest observed ``||T(a) - T(b)||_p / ||a - b||_p`` over random pairs."""

    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    rng = rng if rng is not None else np.random.default_rng()
    a = rng.uniform(-scale, scale, (trials, prob.dimension))
    b = rng.uniform(-scale, scale, (trials, prob.dimension))
    gaps = np.max(np.abs(a - b) / prob.weights, axis=-1)
    moved = np.max(np.abs(_apply(prob, a) - _apply(prob, b)) / prob.weights, axis=-1)
    keep = gaps > 0.0
    return float(np.max(moved[keep] / gaps[keep])) if keep.any() else 0.0


def min_lipschitz_gap(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """``(|min x - min y|, max_i |x_i - y_i|)``; the first never exceeds the second."""

    u = np.asarray(x, dtype=float)
    v = np.asarray(y, dtype=float)
    if u.shape != v.shape or u.size == 0:
        raise DomainError("min_lipschitz_gap needs two nonempty vectors of equal length")
    return float(abs(u.min() - v.min())), float(np.max(np.abs(u - v)))

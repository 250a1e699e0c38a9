"""Verification sweep shared by the CLI and the test suite."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Sequence, Type

import numpy as np

from . import checks as C
from .checks import BaseCheck, CheckOutcome

logger = logging.getLogger(__name__)

CheckClass = Type[BaseCheck]

DEFAULT_SEED = 20240607


def _canon(name: str) -> str:
    """Normalize a check name for comparisons."""
    return name.lower().strip().replace("-", "").replace("_", "")


def list_available_checks() -> List[Dict[str, str]]:
    """Return metadata about all registered checks."""
    items: List[Dict[str, str]] = []
    for cls in C.ALL_CHECKS:
        items.append({
            "name": cls.__name__,
            "description": (cls.__doc__ or "").strip(),
        })
    return items


def resolve_checks(only: Sequence[str] | None = None, exclude: Sequence[str] | None = None) -> List[CheckClass]:
    """Select checks based on optional inclusion/exclusion lists."""
    only_canon = {_canon(x) for x in only} if only else None
    exclude_canon = {_canon(x) for x in exclude} if exclude else set()

    known = {_canon(cls.__name__) for cls in C.ALL_CHECKS}
    unknown = sorted((only_canon or set()) - known) + sorted(exclude_canon - known)
    if unknown:
        raise ValueError(f"Unknown check name(s): {', '.join(unknown)}")

    selected: List[CheckClass] = []
    for cls in C.ALL_CHECKS:
        name = _canon(cls.__name__)
        if only_canon is not None and name not in only_canon:
            continue
        if name in exclude_canon:
            continue
        selected.append(cls)
    return selected


def run_verification(
    *,
    seed: int | None = DEFAULT_SEED,
    only: Sequence[str] | None = None,
    exclude: Sequence[str] | None = None,
    parallel: bool = False,
    check_classes: Sequence[CheckClass] | None = None,
) -> Dict[str, Any]:
    """Run the selected checks and return serialized results.

    Every check draws from its own child generator of ``seed``, so rows and
    numbers do not depend on ``parallel``.
    """
    if check_classes is None:
        check_classes = resolve_checks(only=only, exclude=exclude)
    check_classes = list(check_classes)
    if not check_classes:
        raise ValueError("No checks selected")

    children = np.random.SeedSequence(seed).spawn(len(check_classes))

    def run_one(index: int) -> CheckOutcome:
        check = check_classes[index]()
        outcome = check.run(np.random.default_rng(children[index]))
        logger.info("%s: %s (worst %.3g)", outcome.name, "pass" if outcome.passed else "FAIL", outcome.worst)
        return outcome

    started = time.perf_counter()
    if parallel and len(check_classes) > 1:
        with ThreadPoolExecutor() as pool:
            outcomes = list(pool.map(run_one, range(len(check_classes))))
    else:
        outcomes = [run_one(i) for i in range(len(check_classes))]
    elapsed = time.perf_counter() - started

    rows = [o.to_dict() for o in outcomes]
    passed = sum(1 for o in outcomes if o.passed)
    return {
        "params": {
            "seed": seed,
            "only": list(only or []),
            "exclude": list(exclude or []),
            "parallel": parallel,
        },
        "checks": [cls.__name__ for cls in check_classes],
        "rows": rows,
        "summary": {
            "total": len(outcomes),
            "passed": passed,
            "failed": len(outcomes) - passed,
            "all_passed": passed == len(outcomes),
            "seconds": round(elapsed, 4),
        },
    }

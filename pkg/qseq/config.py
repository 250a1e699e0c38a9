"""Tolerances and evaluation thresholds shared by every module."""

from __future__ import annotations

import logging
import math
import os

logger = logging.getLogger(__name__)

TOL_ENV_VAR = "QSEQ_TOL"
DEFAULT_TOL = 1e-9

# Mixed tolerance for identity checks; identity magnitudes grow with |q| > 1.
ATOL = 1e-10
RTOL = 1e-9

# Orders above this, or arguments beyond CLOSED_FORM_ABS, use the
# trigonometric/hyperbolic closed forms.
RECURRENCE_LIMIT = 64
CLOSED_FORM_ABS = 4.0

# U_{k-j-1}(q) must exceed this before a support chord divides by it.
CHORD_DENOMINATOR_FLOOR = 1e-14

# Distance from an integer under which pi/arccos(x) is snapped before flooring.
TAU_SNAP = 1e-12


def tolerance() -> float:
    """Return the comparison tolerance, honouring ``QSEQ_TOL`` when it is valid."""

    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not a number", TOL_ENV_VAR, raw)
        return DEFAULT_TOL
    if not math.isfinite(value) or value <= 0.0:
        logger.warning("Ignoring %s=%r: must be a positive finite number", TOL_ENV_VAR, raw)
        return DEFAULT_TOL
    return value


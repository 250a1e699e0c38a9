import logging

import pytest

from qseq.config import DEFAULT_TOL, TOL_ENV_VAR, tolerance
from qseq.sequences import Verdict, WindowSequence, classify


def test_default(monkeypatch):
    monkeypatch.delenv(TOL_ENV_VAR, raising=False)
    assert tolerance() == DEFAULT_TOL
    monkeypatch.setenv(TOL_ENV_VAR, "  ")
    assert tolerance() == DEFAULT_TOL


def test_override(monkeypatch):
    monkeypatch.setenv(TOL_ENV_VAR, "1e-6")
    assert tolerance() == 1e-6


@pytest.mark.parametrize("raw", ["abc", "-1", "0", "inf", "nan"])
def test_invalid_values_fall_back(monkeypatch, caplog, raw):
    monkeypatch.setenv(TOL_ENV_VAR, raw)
    with caplog.at_level(logging.WARNING, logger="qseq.config"):
        assert tolerance() == DEFAULT_TOL
    assert TOL_ENV_VAR in caplog.text


def test_tolerance_reaches_classification(monkeypatch):
    # off by 1e-7 from affine at q = 1
    p = WindowSequence.from_values([1.0, 2.0, 3.0000001])
    monkeypatch.delenv(TOL_ENV_VAR, raising=False)
    assert classify(p, 1.0).verdict is Verdict.Q_CONVEX
    monkeypatch.setenv(TOL_ENV_VAR, "1e-6")
    assert classify(p, 1.0).verdict is Verdict.Q_AFFINE

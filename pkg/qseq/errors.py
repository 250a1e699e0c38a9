"""Exception hierarchy. The CLI maps these onto exit codes."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .contraction import ContractionCertificate, FixedPointResult


class QSeqError(Exception):
    """Base class for every error raised by qseq."""


class DomainError(QSeqError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedError(DomainError):
    """The input is well formed but not covered by the implemented theory."""


class PreconditionError(QSeqError, ValueError):
    """A mathematical precondition of the operation does not hold."""


class NotContractionError(PreconditionError):
    """The operator is not certified to be a contraction for the given weights."""

    def __init__(self, message: str, certificate: "ContractionCertificate") -> None:
        super().__init__(message)
        self.certificate = certificate


class ConvergenceError(QSeqError, RuntimeError):
    """Fixed-point iteration ran out of iterations; ``result`` holds the best iterate."""

    def __init__(self, message: str, result: "FixedPointResult") -> None:
        super().__init__(message)
        self.result = result

    def to_dict(self) -> dict[str, Any]:
        return {"error": str(self), "best": self.result.to_dict()}

"""
Error types for salemcount.

Every failure raised by the library is a ``SalemError`` subclass carrying an
``ErrorCategory`` and free-form context, so the CLI can decide between a
usage failure and a computation failure and logs stay structured.
"""

import logging
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class ErrorCategory(Enum):
    """Categories of errors for handling and reporting."""

    INPUT = "INPUT"  # Malformed or out-of-contract arguments
    DOMAIN = "DOMAIN"  # Arguments outside a function's mathematical domain
    LAYOUT = "LAYOUT"  # Root layout disagrees with the polynomial class
    NUMERIC = "NUMERIC"  # Tolerance or step-size failures
    STORAGE = "STORAGE"  # Census cache problems
    UNKNOWN = "UNKNOWN"


class SalemError(Exception):
    """Base exception class for salemcount errors with context."""

    default_category = ErrorCategory.UNKNOWN

    def __init__(
        self,
        message: str,
        error_category: Optional[ErrorCategory] = None,
        additional_context: Optional[Dict[str, Any]] = None,
        correlation_id: Optional[str] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_category = error_category or self.default_category
        self.additional_context = additional_context or {}
        self.correlation_id = correlation_id
        self.timestamp = datetime.now().isoformat()

    @classmethod
    def from_exception(cls, exc: Exception, **kwargs: Any) -> "SalemError":
        """Wrap a foreign exception, keeping its type name as context."""
        if isinstance(exc, SalemError):
            return exc
        context = dict(kwargs.pop("additional_context", None) or {})
        context.setdefault("exception_type", type(exc).__name__)
        category = kwargs.pop("error_category", None)
        if category is None:
            if isinstance(exc, (ValueError, TypeError)):
                category = ErrorCategory.INPUT
            elif isinstance(exc, (ArithmeticError, FloatingPointError)):
                category = ErrorCategory.NUMERIC
            elif isinstance(exc, OSError):
                category = ErrorCategory.STORAGE
        return cls(
            str(exc),
            error_category=category,
            additional_context=context,
            **kwargs,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to a dictionary for logging or serialization."""
        return {
            "error_type": type(self).__name__,
            "message": self.message,
            "error_category": self.error_category.value,
            "timestamp": self.timestamp,
            "correlation_id": self.correlation_id,
            "additional_context": self.additional_context,
        }

    def __str__(self) -> str:
        parts = [f"[{self.error_category.value}] {self.message}"]
        for key, value in self.additional_context.items():
            parts.append(f"{key}={value}")
        if self.correlation_id:
            parts.append(f"Correlation ID: {self.correlation_id}")
        return " | ".join(parts)


class InputError(SalemError):
    default_category = ErrorCategory.INPUT


class NotSelfReciprocal(InputError):
    pass


class OddDegree(InputError):
    pass


class NotMonic(InputError):
    pass


class ZeroPolynomial(InputError):
    pass


class ZeroDivisor(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class BoundTooSmall(InputError):
    pass


class OverlappingIntervals(InputError):
    pass


class UnsupportedParams(InputError):
    pass


class OddDimension(InputError):
    pass


class DuplicatePoints(InputError):
    pass


class UnsupportedM(InputError):
    pass


class DomainError(SalemError):
    default_category = ErrorCategory.DOMAIN


class OutOfDomain(DomainError):
    pass


class LayoutViolation(SalemError):
    default_category = ErrorCategory.LAYOUT


class ToleranceNotMet(SalemError):
    default_category = ErrorCategory.NUMERIC


class SingularStencil(SalemError):
    default_category = ErrorCategory.NUMERIC


class EmptyCensus(SalemError):
    default_category = ErrorCategory.STORAGE


class CacheMismatch(SalemError):
    default_category = ErrorCategory.STORAGE


def is_usage_error(error: BaseException) -> bool:
    """Whether an error stems from bad arguments rather than the computation."""
    return isinstance(error, SalemError) and error.error_category is ErrorCategory.INPUT

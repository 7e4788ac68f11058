import pytest

from salemcount.core.error_handling import (
    BoundTooSmall,
    CacheMismatch,
    DomainError,
    ErrorCategory,
    LayoutViolation,
    OutOfDomain,
    SalemError,
    SingularStencil,
    ToleranceNotMet,
    is_usage_error,
)


def test_str_renders_category_and_context():
    err = BoundTooSmall("Bound must exceed 1", additional_context={"H": "1"})
    assert str(err) == "[INPUT] Bound must exceed 1 | H=1"
    err.correlation_id = "cid"
    assert str(err).endswith("Correlation ID: cid")


@pytest.mark.parametrize(
    "cls,category",
    [
        (BoundTooSmall, ErrorCategory.INPUT),
        (OutOfDomain, ErrorCategory.DOMAIN),
        (LayoutViolation, ErrorCategory.LAYOUT),
        (ToleranceNotMet, ErrorCategory.NUMERIC),
        (SingularStencil, ErrorCategory.NUMERIC),
        (CacheMismatch, ErrorCategory.STORAGE),
    ],
)
def test_default_categories(cls, category):
    assert cls("x").error_category is category


def test_explicit_category_wins():
    err = DomainError("x", error_category=ErrorCategory.UNKNOWN)
    assert err.error_category is ErrorCategory.UNKNOWN


def test_to_dict():
    data = LayoutViolation("two roots above 2", additional_context={"roots_above_2": 2}).to_dict()
    assert data["error_type"] == "LayoutViolation"
    assert data["error_category"] == "LAYOUT"
    assert data["additional_context"] == {"roots_above_2": 2}
    assert data["timestamp"]


def test_from_exception_maps_builtin_types():
    assert SalemError.from_exception(ValueError("bad")).error_category is ErrorCategory.INPUT
    assert SalemError.from_exception(ZeroDivisionError("div")).error_category is ErrorCategory.NUMERIC
    wrapped = SalemError.from_exception(OSError("disk"))
    assert wrapped.error_category is ErrorCategory.STORAGE
    assert wrapped.additional_context["exception_type"] == "OSError"
    original = ToleranceNotMet("x")
    assert SalemError.from_exception(original) is original


def test_is_usage_error():
    assert is_usage_error(BoundTooSmall("x"))
    assert not is_usage_error(ToleranceNotMet("x"))
    assert not is_usage_error(ValueError("x"))

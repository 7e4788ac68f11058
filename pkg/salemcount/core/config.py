"""
Configuration models for salemcount.

Numeric integration, Monte-Carlo sampling and census enumeration are all
driven by small pydantic models; a YAML file can provide defaults for each of
them and the CLI flags override what the file says.
"""

import logging
import math
import os
import re
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError

from salemcount.core.error_handling import ErrorCategory, SalemError

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64


class QuadratureScheme(str, Enum):
    """One-dimensional rules used to build tensor quadratures."""

    GAUSS_LEGENDRE = "gauss_legendre"
    TANH_SINH = "tanh_sinh"


class QuadratureSpec(BaseModel):
    """Deterministic numeric-integration settings.

    ``nodes`` is the largest per-dimension node count the adaptive rule may
    reach before giving up.
    """

    nodes: int = Field(default=64, ge=2)
    scheme: QuadratureScheme = QuadratureScheme.GAUSS_LEGENDRE
    abs_tol: float = Field(default=1e-8, gt=0)


class McSpec(BaseModel):
    """Monte-Carlo settings; one seed fixes every substream."""

    samples: int = Field(default=1_000_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    chunk_size: int = Field(default=65536, ge=1)


class McEstimate(BaseModel):
    """A Monte-Carlo result with its standard error."""

    estimate: float
    stderr: float
    samples: int
    seed: int


class CensusConfig(BaseModel):
    """Settings for exact enumeration."""

    jobs: Optional[int] = Field(default=None, ge=1)
    tolerance: float = Field(default=1e-12, gt=0)
    cache_dir: Optional[str] = None

    def worker_count(self) -> int:
        return self.jobs or os.cpu_count() or 1


class LoggingConfig(BaseModel):
    level: str = "INFO"
    file: Optional[str] = None
    json_format: bool = Field(default=False, alias="json")

    model_config = {"populate_by_name": True}


class SalemConfig(BaseModel):
    """Top-level configuration file layout."""

    census: CensusConfig = Field(default_factory=CensusConfig)
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    monte_carlo: McSpec = Field(default_factory=McSpec)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    provenance_dir: Optional[str] = None


def _expand_env(value: Any) -> Any:
    if isinstance(value, str):
        return os.path.expandvars(value)
    if isinstance(value, dict):
        return {k: _expand_env(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_expand_env(v) for v in value]
    return value


def load_config(config_path: Union[str, Path]) -> SalemConfig:
    """
    Load configuration from a YAML (or JSON) file.

    Args:
        config_path: Path to the configuration file; ``$VAR`` references are
            expanded in the path and in string values.

    Returns:
        Validated configuration
    """
    path = Path(os.path.expandvars(str(config_path)))
    logger.info(f"Loading configuration from {path}")

    if not path.exists():
        raise SalemError(
            f"Configuration file not found: {path}",
            error_category=ErrorCategory.INPUT,
        )

    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    if not isinstance(raw, dict):
        raise SalemError(
            "Configuration root must be a mapping",
            error_category=ErrorCategory.INPUT,
            additional_context={"path": str(path)},
        )

    try:
        return SalemConfig.model_validate(_expand_env(raw))
    except ValidationError as e:
        raise SalemError(
            f"Invalid configuration: {e.error_count()} error(s)",
            error_category=ErrorCategory.INPUT,
            additional_context={"path": str(path), "errors": e.errors()[0]["msg"]},
        ) from e


_PI_TERM = re.compile(r"^\s*([0-9./]*)\s*\*?\s*pi\s*(?:/\s*([0-9]+))?\s*$", re.IGNORECASE)


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``p/q``, an integer or a decimal string into an exact rational."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SalemError(
            f"Not a rational number: {text!r}",
            error_category=ErrorCategory.INPUT,
        ) from e


def parse_angle(text: str) -> float:
    """Parse an angle given as a rational or as a rational multiple of pi.

    Accepted: ``0.5``, ``3/4``, ``pi``, ``pi/2``, ``3pi/4``, ``0.25pi``.
    """
    match = _PI_TERM.match(text)
    if match:
        factor = parse_rational(match.group(1)) if match.group(1) else Fraction(1)
        if match.group(2):
            factor /= int(match.group(2))
        return float(factor) * math.pi
    return float(parse_rational(text))

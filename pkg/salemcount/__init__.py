"""
salemcount: exact census of Salem numbers of fixed degree, the Pfaffian
angle density of their conjugates, and the asymptotic constants that tie
the two together.
"""

__version__ = "0.1.0"

from salemcount.core.census import (  # noqa: E402
    CensusSummary,
    IntervalSpec,
    SalemRecord,
    enumerate_census,
)
from salemcount.core.config import McSpec, QuadratureSpec, SalemConfig  # noqa: E402
from salemcount.core.error_handling import SalemError  # noqa: E402
from salemcount.salem_counter import SalemCounter  # noqa: E402

__all__ = [
    "SalemCounter",
    "CensusSummary",
    "IntervalSpec",
    "SalemRecord",
    "enumerate_census",
    "McSpec",
    "QuadratureSpec",
    "SalemConfig",
    "SalemError",
]

"""
Core components for the salemcount package.

Exact polynomial arithmetic, the census, the angle kernel, quadrature,
asymptotic constants and the comparison tables.
"""

__all__ = [
    "polynomials",
    "census",
    "census_store",
    "kernel",
    "quadrature",
    "asymptotics",
    "harness",
    "config",
    "error_handling",
    "logger",
    "provenance",
]

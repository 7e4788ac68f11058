#!/usr/bin/env python
"""Minimal setup script for salemcount."""

from setuptools import setup, find_packages
from pathlib import Path

this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding="utf-8")

__version__ = "0.1.0"

setup(
    name="salemcount",
    version=__version__,
    description="Exact censuses of Salem numbers of fixed degree and the limiting law of their conjugate angles",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="salemcount developers",
    packages=find_packages(include=["salemcount", "salemcount.*"]),
    include_package_data=True,
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22.0",
        "scipy>=1.8.0",
        "pyyaml>=6.0",
        "typer>=0.7.0",
        "pydantic>=2.0.0",
        "rich>=12.6.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "sympy>=1.11",
            "flake8>=6.0.0",
            "mypy>=1.0.0",
            "types-PyYAML",
            "black>=23.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "salemcount=salemcount.cli:app",
        ],
    },
)

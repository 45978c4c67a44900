#!/usr/bin/env python3
from pathlib import Path

from setuptools import find_packages, setup

HERE = Path(__file__).parent


def read_requirements():
    """Runtime requirements from requirements.txt (pytest excluded)"""
    lines = (HERE / "requirements.txt").read_text().splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#") and not line.startswith("pytest")]


setup(
    name="ardl-kit",
    version="0.1.0",
    description="ARDL bounds testing, error-correction, FMOLS/CCR and diagnostics for annual time series",
    python_requires=">=3.9",
    packages=find_packages(include=["agents", "database", "econometrics", "models"]),
    py_modules=["config", "main"],
    install_requires=read_requirements(),
    extras_require={"test": ["pytest>=7.0.0"]},
    entry_points={"console_scripts": ["ardl-kit=main:cli"]},
)

"""Eigenvalue constructions for step-potential operators and Lieb-Thirring functionals."""

__version__ = "0.1.0"

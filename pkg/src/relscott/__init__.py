"""Numerical laboratory for relativistic Scott corrections with self-generated fields."""

__version__ = "0.1.0"

"""Exact computations in the negative half of quantum groups and folding."""

__version__ = "0.1.0"

"""Discrete complex analysis on black/white triangulated surfaces."""

__version__ = "0.1.0"

"""Numerical analysis of quarter-plane walks with small steps."""

__version__ = "0.1.0"

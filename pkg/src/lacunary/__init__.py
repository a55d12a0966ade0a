"""Finite-scale tools for hyperbolicity, small cancellation and quotient chains."""

__version__ = "0.1.0"

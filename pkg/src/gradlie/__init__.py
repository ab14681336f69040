"""Exact computations with truncated graded Lie algebras."""

__version__ = "0.1.0"

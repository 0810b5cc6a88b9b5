"""Exact characteristic-class calculus on products of projective spaces."""

__version__ = "0.1.0"

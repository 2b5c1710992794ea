"""Numerical toolkit for inequalities on positive definite matrices."""

__version__ = "0.1.0"

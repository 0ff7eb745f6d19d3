"""Numerical verification of eigenvalue upper bounds from holomorphic maps to CP^m."""

__version__ = "0.1.0"

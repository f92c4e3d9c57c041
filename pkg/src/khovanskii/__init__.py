"""Exact matrix-power approximations of cube roots, m-th roots and polynomial roots."""

__version__ = "0.1.0"

"""Combinatorics of CAT(0) cube complexes and their boundaries."""

__version__ = "0.1.0"

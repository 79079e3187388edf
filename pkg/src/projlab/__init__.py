"""Projection constants, factorizations, enlargements and finite dimensional decompositions."""

__version__ = "0.1.0"

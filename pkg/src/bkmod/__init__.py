"""Finite-precision linear algebra of Breuil-Kisin modules."""

__version__ = "0.1.0"

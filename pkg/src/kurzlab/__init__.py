"""Finite-scale laboratory for twisted Diophantine approximation along arithmetic sets."""

__version__ = "0.1.0"

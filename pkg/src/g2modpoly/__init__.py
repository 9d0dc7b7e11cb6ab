"""Genus-2 modular polynomials for theta-derived invariants."""

__version__ = "0.1.0"

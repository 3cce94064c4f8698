"""Numerical laboratory for four-dimensional matrix Painleve systems:
Hamiltonians, Lax pairs, formal normal forms at singular points,
degeneration rules and Laplace duality."""

__version__ = "0.1.0"

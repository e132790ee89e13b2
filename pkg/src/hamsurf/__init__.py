"""Hamiltonian flows on hyperbolic surfaces and averaged counting quasi-morphisms."""

__version__ = "0.1.0"

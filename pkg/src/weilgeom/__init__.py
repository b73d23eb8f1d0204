"""Exact infinitesimal calculus on Weil algebras and harmonic-morphism checks."""

__version__ = "0.1.0"

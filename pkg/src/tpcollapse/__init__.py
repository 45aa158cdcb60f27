"""Coxeter and 0-Hecke machinery for collapsing subword simplices."""

__version__ = "0.1.0"

"""Exact workbench for odd form algebras over finite commutative rings."""

__version__ = "0.1.0"

"""Exact computer algebra for the crossed-product algebras Q^lambda."""

__version__ = "0.1.0"

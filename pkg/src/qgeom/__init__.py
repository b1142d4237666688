"""Finite-dimensional geometric quantum mechanics: tensors, brackets and their identities."""

__version__ = "0.1.0"

"""Locally trivial cohomology of Cartan groups mod p^n and CM minimal degrees."""

__version__ = "0.1.0"

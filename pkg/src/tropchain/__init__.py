"""Divisors, ranks and Brill-Noether ranks on chains of cycles."""

__version__ = "0.1.0"

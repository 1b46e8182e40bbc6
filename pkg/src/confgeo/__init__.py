"""Exact-arithmetic verification engine for graded descent identities."""

__version__ = "0.1.0"

"""Exact toy-theory phase spaces, measurements and brute-force verification."""

__version__ = "0.1.0"

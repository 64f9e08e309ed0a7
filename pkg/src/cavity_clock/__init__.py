"""Precision of a cavity clock under non-uniform acceleration."""

__version__ = "0.1.0"

"""Synthetic-scene benchmarking toolkit for semantic mapping methods."""

__version__ = "0.1.0"

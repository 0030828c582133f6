"""Deterministic multi-agent team simulation toolkit."""

__version__ = "0.1.0"

"""Exact toric foliated minimal model program."""

__version__ = "0.1.0"

"""Numerics for singular self-dual Zollfrei metrics and their twistor data."""

__version__ = "0.1.0"

"""Spectral concentration of interval unions under decreasing rearrangement."""

__version__ = "0.1.0"

"""Enumerate blocked boards up to symmetry and census polyomino tilings."""

__version__ = "0.1.0"

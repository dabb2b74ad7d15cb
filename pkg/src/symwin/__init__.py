"""Symbolic model sets over integer odometers, built and checked exactly."""

__version__ = "0.1.0"

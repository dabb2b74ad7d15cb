"""Explicit windows: counterexample, AC family, paths and blends, entropy stages."""

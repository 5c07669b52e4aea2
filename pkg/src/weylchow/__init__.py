"""Exact-arithmetic workbench for Weyl-invariant rings, Dickson classes,
Milnor primitives, and chart-driven Brown-Peterson spectral sequences."""

__version__ = "0.1.0"

"""Exact combinatorics of fans, monoid schemes, log fan pairs, and
toric Chow complexes over the field with one element."""

__version__ = "0.1.0"

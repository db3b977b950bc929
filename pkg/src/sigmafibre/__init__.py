"""Exact decision procedures for finite presentability of normal fibre
products, driven by BNS invariant complements represented as rational
sphere sets."""

__version__ = "0.1.0"

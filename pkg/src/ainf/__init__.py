"""Exact twisted A-infinity algebra toolkit: validation, homotopy transfer, equivariant extension."""

__version__ = "0.1.0"

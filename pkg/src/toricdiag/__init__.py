"""Resolutions of the diagonal and exceptional collections on toric varieties."""

__version__ = "0.1.0"

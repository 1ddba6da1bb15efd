"""Spectra, structure sheaves and modelled spaces for finite rings and lattices."""

__version__ = "0.1.0"

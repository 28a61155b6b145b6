"""Band edges and spectral gap lengths of 1-periodic Hill-Schroedinger operators."""

__version__ = "0.1.0"

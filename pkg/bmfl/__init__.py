"""Exact many-boson spectra and mean-field diagnostics."""
__version__ = "0.1.0"

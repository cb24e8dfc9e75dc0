"""Resolvent-difference spectra of generalized Robin Laplacians on the n-ball."""

__version__ = "0.1.0"

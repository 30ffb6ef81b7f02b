"""Arveson spectra and pure-point / absolutely continuous / singular continuous
decompositions of group actions, checked on exactly solvable models."""

__version__ = "0.1.0"

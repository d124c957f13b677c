"""Numerical laboratory for the Cartan-Engel distribution, the dancing metric
on point-line pairs, and the projective geometry of dancing curves."""

__version__ = "0.1.0"

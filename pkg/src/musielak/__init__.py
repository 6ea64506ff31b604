"""Generalized N-functions, fractional Musielak-Sobolev modulars and a
direct-minimization solver for a fractional Schrodinger-type problem."""

__version__ = "0.1.0"

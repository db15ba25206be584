"""Certified 2-adic residue-disk computations for quadratic points on
odd-degree hyperelliptic curves, with exact densities and a Selmer sampling model."""

__version__ = "0.1.0"

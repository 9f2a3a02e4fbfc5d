"""Biquadratic curves and their companion problems.

A numpy/scipy library for plane curves of degree <= 2 in each variable:
root-swap dynamics on the curve, closure of inscribed-circumscribed
polygon chains between two conics, polynomial Pell equations, separated
solutions of the string equation vanishing on the curve, and elliptic
lattice/spin-chain verifiers. Every analytic criterion ships next to an
independent brute-force oracle.
"""

__version__ = "0.1.0"

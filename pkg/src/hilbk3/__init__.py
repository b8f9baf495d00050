"""Exact-arithmetic engine for the curve-counting series of Hilbert schemes
of points on K3 surfaces: quasi-Jacobi form expansions, the WDVV coefficient
recursion, Fock-space quantum-multiplication operators, and the
hyperelliptic/BPS counting tables."""

__version__ = "0.1.0"

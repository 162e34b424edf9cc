"""Spectra of Hill operators ``-y'' + q y`` with 1-periodic potentials.

Modules
-------
potential    trigonometric-polynomial potentials and Fourier pairings
diffpoly     the recursion polynomials ``s_k`` and their means ``a_k``
odecore      fundamental solutions, discriminant and WKB remainders
spectra      Dirichlet, Neumann and (anti)periodic eigenvalues, Floquet exponents
asymptotics  expansion coefficients and asymptotic predictions
products     infinite products, Hilbert transform, isolating discs
verify       residual analysis of the asymptotic formulas
cli          the ``hill-spectra`` command
"""
from .potential import FourierSeries, Potential

__version__ = "0.1.0"

__all__ = ["Potential", "FourierSeries", "__version__"]

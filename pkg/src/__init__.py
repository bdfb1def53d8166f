"""
Symbiotic Branching Lab.

A numerical laboratory for second moments of the symbiotic branching model
and related interacting diffusions on Z^d: local-time renewal equations,
Lyapunov exponents, subexponential asymptotics, aging correlations and
independent Monte Carlo verification.

This package provides:
- Random-walk kernels, return probabilities and Green functions
- A Volterra solver for exponential moments of local times
- Second-moment, intermittency and aging analysis
- Lattice and dual-particle Monte Carlo estimators
- Configuration, caching and the `symbranch` command-line interface
"""

__version__ = "0.1.0"
__author__ = "Om Mengshetti"

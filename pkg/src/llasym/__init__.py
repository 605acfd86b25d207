"""Inverse-scattering and large-time asymptotics toolkit for the
Landau-Lifshitz spin chain on a genus-1 spectral torus."""

__version__ = "0.1.0"

"""Scattering resonances of radial step potentials on the logarithmic Riemann surface."""

__version__ = "0.1.0"

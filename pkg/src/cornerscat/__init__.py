"""Verification and experiment suite for 2D time-harmonic elastic scattering
by penetrable scatterers with right-angled corners."""

__version__ = "0.1.0"

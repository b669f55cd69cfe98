"""Plane-wave integrals of spherical harmonics on S^n."""

__version__ = "0.1.0"

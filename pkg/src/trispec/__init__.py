"""Dirichlet spectra of triangles: exact lattice spectra, FEM, verification."""

from . import certify, cli, equilateral, fem, geometry, isosceles, reports, transplant

__all__ = [
    "certify",
    "cli",
    "equilateral",
    "fem",
    "geometry",
    "isosceles",
    "reports",
    "transplant",
]

__version__ = "0.1.0"

"""Certification toolkit for Oeljeklaus-Toma manifolds and Inoue surfaces."""

__version__ = "0.3.0"

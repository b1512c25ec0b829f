"""Exact computations with Bieberbach groups and compact-leaf foliations of flat manifolds."""

__version__ = "0.1.0"

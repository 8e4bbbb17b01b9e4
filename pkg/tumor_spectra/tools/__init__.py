"""Numerical and I/O helpers shared by the analysis modules."""

"""Stationary states, modal spectra, Stokes oracle, simulation and geometry."""

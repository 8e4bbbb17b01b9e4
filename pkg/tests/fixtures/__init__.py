"""Test fixtures for tumor-spectra."""

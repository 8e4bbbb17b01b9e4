"""
Module entry point for running tumor-spectra as a module.

Allows running with: python -m tumor_spectra
"""

from .main import main

if __name__ == "__main__":
    main()

"""Exact toric degeneration toolkit: polytopes, fans, integral affine complexes and the discrete Legendre transform."""
__version__ = "0.1.0"

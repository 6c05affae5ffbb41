"""Finite-difference reference solver."""

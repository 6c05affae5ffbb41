"""Reaction-diffusion solvers, datasets and a from-scratch neural surrogate."""

__version__ = "0.1.0"

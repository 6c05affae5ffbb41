"""Exact and semi-exact solutions of the reaction-diffusion slab problem."""

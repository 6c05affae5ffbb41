"""Metrics, dimensionless analysis and experiment sweeps."""

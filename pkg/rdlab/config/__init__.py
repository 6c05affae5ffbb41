"""Run configuration schemas and loading."""

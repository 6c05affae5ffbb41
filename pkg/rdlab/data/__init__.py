"""Dataset generation, normalization and persistence."""

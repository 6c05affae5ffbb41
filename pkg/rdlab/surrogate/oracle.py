"""Analytic oracle standing in for a trained network."""

import numpy as np

from .base import ConcentrationModel
from ..analytic.models import ProblemSpec, SeriesOptions, SpaceTimePoint
from ..analytic.series import concentration


class AnalyticOracleModel(ConcentrationModel):
    """Answers every query with the analytic series."""

    name = "oracle"

    def __init__(self, options: SeriesOptions = SeriesOptions(max_terms=20000)):
        self.options = options

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Series value at each row."""
        rows = np.atleast_2d(np.asarray(features, dtype=float))
        out = np.empty(len(rows))
        for i, (c0, half_thickness, x, t, k, de) in enumerate(rows):
            spec = ProblemSpec(de=de, k=k, c0=c0, half_thickness=half_thickness)
            out[i] = concentration(spec, SpaceTimePoint(float(x), float(t)), self.options)
        return out

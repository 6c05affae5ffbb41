"""Base interface for concentration models."""

from abc import ABC, abstractmethod

import numpy as np


class ConcentrationModel(ABC):
    """Anything that maps raw feature rows to concentrations."""

    name: str = "model"

    @abstractmethod
    def predict(self, features: np.ndarray) -> np.ndarray:
        """Predict concentrations.

        Args:
            features: Raw (c0, L, x, t, k, de) rows in SI units, shape (m, 6)

        Returns:
            Concentrations in mol/m^3, shape (m,)
        """
        pass

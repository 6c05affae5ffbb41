"""Factory for concentration models."""

import logging
from pathlib import Path
from typing import Union

from .base import ConcentrationModel
from .oracle import AnalyticOracleModel
from .predictor import NetworkModel

logger = logging.getLogger(__name__)

ORACLE_NAME = "oracle"


def load_model(name_or_path: Union[str, Path]) -> ConcentrationModel:
    """Return the analytic oracle for "oracle", otherwise load a checkpoint file.

    Args:
        name_or_path: "oracle" or the path of a checkpoint JSON

    Returns:
        Model ready for predict()
    """
    if str(name_or_path) == ORACLE_NAME:
        logger.info("Using the analytic oracle as model")
        return AnalyticOracleModel()
    logger.info(f"Loading network checkpoint {name_or_path}")
    return NetworkModel.from_file(name_or_path)

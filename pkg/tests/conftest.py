"""Shared fixtures."""

import pytest

from rdlab.analytic.models import BASELINE_SPEC, ProblemSpec
from rdlab.data.generator import GenerationSettings, generate
from rdlab.data.labeling import LabelSettings
from rdlab.data.models import ParameterRanges


@pytest.fixture
def baseline_spec() -> ProblemSpec:
    """c0 = 75.5, L = 0.05, De = 2.6e-9, k = 2.125e-7."""
    return BASELINE_SPEC


@pytest.fixture
def small_settings() -> GenerationSettings:
    """20 batches of 10 samples on desk-scale ranges with a coarse FD grid."""
    return GenerationSettings(
        seed=7,
        n_batches=20,
        batch_size=10,
        points_per_spec=5,
        ranges=ParameterRanges.desk_scale(),
        label=LabelSettings(nx=51, nt=60, series_max_terms=5000),
    )


@pytest.fixture
def small_dataset(small_settings):
    """Generated once per test from small_settings."""
    return generate(small_settings)

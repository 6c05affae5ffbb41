"""Labeling of sampled features with the FD solver or the analytic series."""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, Field

from .models import LABEL_SLACK, LabelSource, Sample
from ..analytic.models import ProblemSpec, SeriesOptions, SpaceTimePoint
from ..analytic.series import concentration
from ..numerics.crank_nicolson import probe, solve_many
from ..numerics.models import DEFAULT_NT, DEFAULT_NX, Grid

logger = logging.getLogger(__name__)


class LabelSettings(BaseModel):
    """Solver settings used when labeling samples."""

    nx: int = Field(DEFAULT_NX, ge=3)
    nt: int = Field(DEFAULT_NT, ge=1)
    startup_substeps: int = Field(2, ge=0)
    series_max_terms: int = Field(20000, ge=1)

    def series_options(self) -> SeriesOptions:
        return SeriesOptions(max_terms=self.series_max_terms)


@dataclass
class SpecGroup:
    """Points sharing one problem spec; FD labels reuse a single solve."""
    spec: ProblemSpec
    xs: np.ndarray
    ts: np.ndarray  # seconds


def _clip_labels(labels: np.ndarray, c0: float) -> np.ndarray:
    outside = (labels < -LABEL_SLACK * c0) | (labels > c0 * (1.0 + LABEL_SLACK))
    if np.any(outside):
        logger.warning(f"Clipping {int(outside.sum())} label(s) into [0, {c0}]")
    return np.clip(labels, 0.0, c0)


def label_groups(
    groups: Sequence[SpecGroup], source: LabelSource, settings: LabelSettings
) -> List[np.ndarray]:
    """Label every group; returns one label array per group."""
    if source == LabelSource.ANALYTIC_SERIES:
        opts = settings.series_options()
        return [
            _clip_labels(
                np.array([concentration(g.spec, SpaceTimePoint(float(x), float(t)), opts) for x, t in zip(g.xs, g.ts)]),
                g.spec.c0,
            )
            for g in groups
        ]

    grids = []
    for g in groups:
        horizon = float(np.max(g.ts)) if len(g.ts) else 0.0
        # A zero horizon only occurs when every point sits on the initial condition.
        grids.append(Grid.build(g.spec.half_thickness, horizon if horizon > 0 else 1.0, settings.nx, settings.nt))
    fields = solve_many([g.spec for g in groups], grids, settings.startup_substeps)
    labels = []
    for g, field in zip(groups, fields):
        values = np.array([probe(field, float(x), float(t)) for x, t in zip(g.xs, g.ts)])
        labels.append(_clip_labels(values, g.spec.c0))
    return labels


def label_sample(features: Sequence[float], source: LabelSource, settings: LabelSettings = LabelSettings()) -> Sample:
    """Label a single (c0, L, x, t, k, de) tuple."""
    c0, half_thickness, x, t, k, de = (float(v) for v in features)
    spec = ProblemSpec(de=de, k=k, c0=c0, half_thickness=half_thickness)
    group = SpecGroup(spec=spec, xs=np.array([x]), ts=np.array([t]))
    label = float(label_groups([group], source, settings)[0][0])
    return Sample((c0, half_thickness, x, t, k, de), label, source)

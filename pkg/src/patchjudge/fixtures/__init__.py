"""Shipped reference corpus and the pipeline driver that exercises it."""

from .reference import (
    FROZEN_CLOCK,
    MODEL_ID,
    REFERENCE_SEED,
    REVISION_PAIRS,
    RUN_IDS,
    SAMPLE_MAX,
    build_reference_corpus,
)
from .pipeline import run_reference_pipeline

__all__ = [
    "FROZEN_CLOCK",
    "MODEL_ID",
    "REFERENCE_SEED",
    "REVISION_PAIRS",
    "RUN_IDS",
    "SAMPLE_MAX",
    "build_reference_corpus",
    "run_reference_pipeline",
]

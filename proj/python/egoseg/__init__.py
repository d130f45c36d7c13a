"""Temporal segmentation of egocentric photo streams."""

import json

from ._core import (
    LINKAGES,
    Segmentation,
    ValidationError,
    agglomerate,
    cluster_frames,
    cosine_distance,
    cut_threshold,
    detect_changes,
    evaluate,
    f_measure,
    fuse,
    gce,
    lce,
    local_refinement_error,
    pairwise_energy,
    prune_low_variance,
    rescale_to_unit,
    signed_root_normalize,
    signed_root_normalize_rows,
    smooth_temporal,
    synth,
    trivial_segmentations,
)
from . import _core

__all__ = [
    "LINKAGES",
    "Segmentation",
    "ValidationError",
    "agglomerate",
    "cluster_frames",
    "cosine_distance",
    "cut_threshold",
    "default_config",
    "detect_changes",
    "evaluate",
    "f_measure",
    "fuse",
    "gce",
    "lce",
    "local_refinement_error",
    "pairwise_energy",
    "prune_low_variance",
    "rescale_to_unit",
    "run_pipeline",
    "signed_root_normalize",
    "signed_root_normalize_rows",
    "smooth_temporal",
    "synth",
    "trivial_segmentations",
]


def default_config():
    """The pipeline configuration as a nested dict."""
    return json.loads(_core._default_config())


def run_pipeline(features, detections=None, similarity=None, config=None):
    """Segment an n x d feature array.

    detections: per-frame lists of (tag, confidence) pairs, or None.
    similarity: a similarity table (dict or JSON string) for the tags.
    config: dict overriding any part of default_config().
    """
    merged = default_config()
    for key, value in (config or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    if similarity is not None and not isinstance(similarity, str):
        similarity = json.dumps(similarity)
    return _core._run_pipeline(features, detections, similarity, json.dumps(merged))

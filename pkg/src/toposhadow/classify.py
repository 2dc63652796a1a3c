"""Scan-line shadow classification and the end-to-end detector."""

from dataclasses import dataclass

import numpy as np

from .frame_io import crop_top
from .saliency import Params, filter_stack, std_map, threshold_points
from .sparsify import density_field, thin
from .topology import (
    Complex,
    confidence_map,
    mean_confidence,
    occurrence_map,
    rips_triangles,
)


@dataclass(frozen=True)
class DetectionResult:
    """Everything the detector produces for one frame.

    ``labels`` spans the full frame width (1 = shadow, 0 = visible);
    ``confidence`` covers the cropped region only.  ``simplex_counts``
    is the per-column triangle count the labels are thresholded from.
    """

    labels: np.ndarray
    confidence: np.ndarray
    mean_confidence: float
    simplex_counts: np.ndarray
    cloud_size: int
    triangle_count: int


def scanline_counts(cx, width):
    """Number of triangles whose closed region meets each image column.

    A closed triangle meets exactly the columns between its leftmost and
    rightmost vertex, so the count reduces to a column-extent sweep.
    Returns an int64 vector of length ``width``.
    """
    counts = np.zeros(int(width), dtype=np.int64)
    if len(cx.triangles) == 0:
        return counts
    cols = cx.vertices[:, 1][cx.triangles]
    cmin = cols.min(axis=1)
    cmax = cols.max(axis=1)
    diff = np.zeros(int(width) + 1, dtype=np.int64)
    np.add.at(diff, cmin, 1)
    np.add.at(diff, cmax + 1, -1)
    return np.cumsum(diff[:-1])


def classify_scanlines(counts, tau):
    """Label a column shadow (1) iff its triangle count is strictly
    below tau."""
    if tau < 1:
        raise ValueError("tau must be at least 1")
    return (np.asarray(counts) < tau).astype(np.uint8)


def detect(img, params=None):
    """Run the full pipeline on one uncropped frame.

    crop -> filter stack -> std map -> threshold -> density thinning ->
    triangle build -> occurrence/confidence maps -> scan-line labels.
    Deterministic: identical inputs give bit-identical results.
    """
    if params is None:
        params = Params()
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2D image")
    width = img.shape[1]
    cropped = crop_top(img, params.crop_rows)
    stack = filter_stack(cropped, params)
    saliency = std_map(stack)
    cloud = threshold_points(saliency, params.gamma)
    spacing = density_field(saliency, params)
    sparse = thin(cloud, spacing)
    cx = rips_triangles(sparse, params.epsilon, params.triangle_cap)
    height, cwidth = saliency.shape
    occ = occurrence_map(cx, cwidth, height)
    conf = confidence_map(occ)
    counts = scanline_counts(cx, width)
    labels = classify_scanlines(counts, params.tau)
    return DetectionResult(
        labels=labels,
        confidence=conf,
        mean_confidence=mean_confidence(conf),
        simplex_counts=counts,
        cloud_size=len(sparse),
        triangle_count=len(cx.triangles),
    )

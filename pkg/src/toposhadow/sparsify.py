"""Density-adaptive thinning of the salient point cloud.

Salient regions get a small spacing threshold (keep many points), bland
regions a large one, so the retained cloud is dense exactly where the
saliency map says tissue is.
"""

import numpy as np

from . import _kernels
from .saliency import gaussian_kernel_1d


def density_field(saliency, params):
    """Per-pixel spacing threshold in [phi1, phi1 + phi2].

    The saliency map is normalized to [0, 1], blurred isotropically with
    sigma_w, clamped, and mapped so high saliency gives the minimum
    spacing phi1.
    """
    s_hat = np.asarray(saliency, dtype=np.float64) / 255.0
    kw = gaussian_kernel_1d(params.sigma_w)
    blurred = _kernels.correlate1d_replicate(s_hat, kw, 0)
    blurred = _kernels.correlate1d_replicate(blurred, kw, 1)
    np.clip(blurred, 0.0, 1.0, out=blurred)
    return params.phi1 + params.phi2 * (1.0 - blurred)


def thin(cloud, density):
    """Greedy row-major thinning against each candidate's own spacing.

    A candidate survives iff no previously kept point lies within
    (inclusive) the density value at the candidate.  The result is an
    order-preserving subset of the input cloud.
    """
    pts = np.asarray(cloud, dtype=np.int64)
    if pts.size == 0:
        return pts.reshape(0, 2)
    field = np.asarray(density, dtype=np.float64)
    spacing = field[pts[:, 0], pts[:, 1]]
    kept = _kernels.thin_points(pts, spacing)
    return pts[kept]

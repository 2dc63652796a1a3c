"""Filter-stack saliency: where does repeated smoothing change the image?

The stack holds the input frame followed by successively smoothed copies;
the per-pixel standard deviation across the stack is large exactly where
the local texture is destroyed by smoothing, i.e. where visible tissue
speckle lives.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class Params:
    """Pipeline parameters, defaulting to the tuned operating point.

    ``sigma_u`` smooths along rows (the depth axis), ``sigma_v`` along
    columns, so the default smoothing is strongly vertical.  ``gamma`` is
    a percentage of the 8-bit intensity range.  ``phi1``/``phi2`` bound
    the thinning distance in pixels, ``sigma_w`` smooths the density
    field, ``epsilon`` is the triangle edge threshold and ``tau`` the
    scan-line triangle-count threshold.
    """

    sigma_u: float = 1.8
    sigma_v: float = 0.2
    stack_size: int = 6
    gamma: float = 4.0
    phi1: float = 15.0
    phi2: float = 20.0
    sigma_w: float = 20.0
    epsilon: float = 60.0
    tau: int = 2
    crop_rows: int = 100
    triangle_cap: int = 2_000_000

    def __post_init__(self):
        if self.sigma_u <= 0 or self.sigma_v <= 0 or self.sigma_w <= 0:
            raise ValueError("sigma values must be positive")
        if self.stack_size < 2:
            raise ValueError("stack_size must be at least 2")
        if not 0.0 < self.gamma <= 100.0:
            raise ValueError("gamma must lie in (0, 100]")
        if self.phi1 < 0 or self.phi2 < 0:
            raise ValueError("phi1 and phi2 must be non-negative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.tau < 1:
            raise ValueError("tau must be at least 1")
        if self.crop_rows < 0:
            raise ValueError("crop_rows must be non-negative")
        if self.triangle_cap < 1:
            raise ValueError("triangle_cap must be positive")


def gaussian_kernel_1d(sigma):
    """Unit-sum Gaussian taps truncated at ceil(3*sigma).

    Returns an odd-length float64 vector, symmetric about its centre.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = math.ceil(3.0 * sigma)
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def filter_stack(img, params):
    """Iterated anisotropic blur: layer 0 is the input, each later layer
    is the previous one smoothed vertically by sigma_u then horizontally
    by sigma_v (replicate borders).  Returns (stack_size, H, W) float64.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2D image")
    ku = gaussian_kernel_1d(params.sigma_u)
    kv = gaussian_kernel_1d(params.sigma_v)
    stack = np.empty((params.stack_size,) + img.shape, dtype=np.float64)
    stack[0] = img
    for f in range(1, params.stack_size):
        layer = _kernels.correlate1d_replicate(stack[f - 1], ku, 0)
        stack[f] = _kernels.correlate1d_replicate(layer, kv, 1)
    return stack


def std_map(stack):
    """Per-pixel population standard deviation across the stack layers."""
    stack = np.asarray(stack, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise ValueError("expected a non-empty (layers, H, W) stack")
    mean = stack.mean(axis=0)
    dev = stack - mean[None, :, :]
    return np.sqrt((dev * dev).mean(axis=0))


def threshold_points(saliency, gamma):
    """All (row, col) with saliency >= gamma percent of 255, row-major.

    The comparison is inclusive; a pixel sitting exactly on the threshold
    is salient.  Returns an (N, 2) int64 array.
    """
    if not 0.0 < gamma <= 100.0:
        raise ValueError("gamma must lie in (0, 100]")
    s = np.asarray(saliency, dtype=np.float64)
    thr = gamma * 255.0 / 100.0
    return np.argwhere(s >= thr)

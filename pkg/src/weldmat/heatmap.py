"""Gaussian boundary-heatmap ground truth from a binary segmentation mask.

Pipeline: 3x3 Laplacian edge extraction -> exact Euclidean distance
transform -> Gaussian falloff with a hard cutoff at three sigmas.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyBoundary
from .raster import check_binary_mask, check_float_raster

__all__ = [
    "HeatmapParams",
    "laplacian_boundary",
    "distance_transform",
    "gaussian_heatmap",
    "make_heatmap_gt",
]

LAPLACIAN_KERNEL = np.array(
    [[1.0, 1.0, 1.0], [1.0, -8.0, 1.0], [1.0, 1.0, 1.0]]
)

DEFAULT_EDGE_THRESHOLD = 0.1


@dataclass(frozen=True)
class HeatmapParams:
    sigma: float = 3.0
    edge_threshold: float = DEFAULT_EDGE_THRESHOLD

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not self.edge_threshold > 0:
            raise ValueError("edge_threshold must be > 0")


def laplacian_boundary(seg_gt, edge_threshold=DEFAULT_EDGE_THRESHOLD):
    """Mark boundary pixels of a binary mask via the 3x3 Laplacian response.

    A pixel is boundary iff its raw convolution response exceeds
    ``edge_threshold``. Edges of the raster are replicate-padded so a
    region touching the border does not produce a spurious boundary.
    Only background pixels adjacent to foreground can respond positively,
    so the boundary always lies on the 0 side of the mask.
    """
    seg = check_binary_mask(seg_gt, name="seg_gt").astype(np.float64)
    response = ndimage.convolve(seg, LAPLACIAN_KERNEL, mode="nearest")
    return (response > edge_threshold).astype(np.uint8)


def _edt_1d_sq(f):
    """Exact 1D squared distance transform (lower envelope of parabolas).

    ``f`` holds squared source distances per cell (np.inf where no source);
    at least one entry must be finite. Returns exact integer-valued squared
    distances as float64.
    """
    n = f.shape[0]
    out = np.empty(n)
    v = np.zeros(n, dtype=np.intp)  # indices of envelope parabolas
    z = np.empty(n + 1)             # envelope breakpoints
    q0 = 0
    while f[q0] == np.inf:
        q0 += 1
    v[0] = q0
    z[0] = -np.inf
    z[1] = np.inf
    k = 0
    for q in range(q0 + 1, n):
        fq = f[q]
        if fq == np.inf:
            continue
        s = (fq + q * q - f[v[k]] - v[k] * v[k]) / (2 * q - 2 * v[k])
        while s <= z[k]:
            k -= 1
            s = (fq + q * q - f[v[k]] - v[k] * v[k]) / (2 * q - 2 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        out[q] = (q - v[k]) ** 2 + f[v[k]]
    return out


def distance_transform(boundary):
    """Exact Euclidean distance to the nearest boundary (1) pixel.

    Separable two-pass scheme: a vertical sweep yields per-column counting
    distances, then each row runs the parabola-envelope transform on the
    squared values. All intermediate arithmetic is exact in float64, so the
    result matches a brute-force nearest-pixel scan bit for bit.
    """
    b = check_binary_mask(boundary, name="boundary")
    if not b.any():
        raise EmptyBoundary("boundary map has no 1-pixels")
    h, w = b.shape
    # vertical pass: rows to the nearest source within the same column
    d = np.where(b == 1, 0.0, np.inf)
    for y in range(1, h):
        np.minimum(d[y], d[y - 1] + 1.0, out=d[y])
    for y in range(h - 2, -1, -1):
        np.minimum(d[y], d[y + 1] + 1.0, out=d[y])
    # horizontal pass on squared distances
    dsq = np.square(d)
    for y in range(h):
        dsq[y] = _edt_1d_sq(dsq[y])
    return np.sqrt(dsq)


def gaussian_heatmap(dist, sigma=3.0):
    """Map a distance field through a Gaussian, zeroed at and beyond 3*sigma."""
    d = check_float_raster(dist, name="dist", channels=(1,), unit_range=False)
    if d.min() < 0:
        raise ValueError("distance field must be non-negative")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    heat = np.exp(-np.square(d) / (2.0 * sigma * sigma))
    heat[d >= 3.0 * sigma] = 0.0
    return heat


def make_heatmap_gt(seg_gt, params=HeatmapParams()):
    """Boundary heatmap ground truth for a segmentation mask.

    Composition of boundary extraction, distance transform, and Gaussian
    falloff. A mask with no boundary (all 0 or all 1) yields the all-zero
    heatmap.
    """
    boundary = laplacian_boundary(seg_gt, params.edge_threshold)
    try:
        dist = distance_transform(boundary)
    except EmptyBoundary:
        return np.zeros(boundary.shape, dtype=np.float64)
    return gaussian_heatmap(dist, params.sigma)

"""Probability map -> trimap -> matting solve -> binary mask.

Confident probabilities become hard constraints, the inter-threshold band
becomes the unknown region, and the matting solve re-labels the band using
local image structure. The band boundary snaps to image edges, which is
what repairs jagged contours and fills holes left by plain thresholding.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch
from .matting import (
    AlphaMatte,
    MattingParams,
    build_matting_laplacian,
    partition_system,
    solve_alpha,
)
from .raster import check_image, check_prob_map, to_grayscale

__all__ = ["RefineParams", "build_trimap", "threshold_mask", "refine"]

DEFAULT_C_HIGH = 0.46
DEFAULT_C_LOW = 0.38


@dataclass(frozen=True)
class RefineParams:
    c_high: float = DEFAULT_C_HIGH
    c_low: float = DEFAULT_C_LOW
    matting: MattingParams = field(default_factory=MattingParams)
    mask_threshold: float = 0.5
    band_dilation: int = 0

    def __post_init__(self):
        if not 0.0 <= self.c_low < self.c_high <= 1.0:
            raise ValueError("need 0 <= c_low < c_high <= 1")
        if not 0.0 < self.mask_threshold < 1.0:
            raise ValueError("mask_threshold must be in (0, 1)")
        if self.band_dilation < 0:
            raise ValueError("band_dilation must be >= 0")


def build_trimap(prob, c_high=DEFAULT_C_HIGH, c_low=DEFAULT_C_LOW):
    """Threshold a probability map into {0, 0.5, 1}.

    Ties go to the confident side: prob >= c_high is foreground,
    prob <= c_low is background, everything between is unknown.
    """
    prob = check_prob_map(prob)
    if not 0.0 <= c_low < c_high <= 1.0:
        raise ValueError("need 0 <= c_low < c_high <= 1")
    tri = np.full(prob.shape, 0.5)
    tri[prob >= c_high] = 1.0
    tri[prob <= c_low] = 0.0
    return tri


def threshold_mask(alpha, t=0.5):
    """Binarize an alpha matte: 1 where alpha is strictly above ``t``."""
    if not 0.0 < t < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    values = alpha.alpha if isinstance(alpha, AlphaMatte) else np.asarray(alpha)
    return (values > t).astype(np.uint8)


def _disk(radius):
    r = int(radius)
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    return yy * yy + xx * xx <= r * r


def refine(image, prob, params=RefineParams()):
    """Refine a segmentation probability map into a binary mask.

    Returns ``(mask, alpha, trimap)``. The image is converted to grayscale
    internally. When the trimap has no unknown pixels the solve is skipped
    and the mask is simply ``prob >= c_high``. Laplacian assembly is
    restricted to windows touching the unknown band, which leaves the
    solved system identical to the full assembly.
    """
    image = check_image(image)
    prob = check_prob_map(prob)
    if image.shape[:2] != prob.shape:
        raise DimensionMismatch(f"image {image.shape[:2]} vs prob {prob.shape}")

    trimap = build_trimap(prob, params.c_high, params.c_low)
    if params.band_dilation > 0:
        grown = ndimage.binary_dilation(trimap == 0.5, structure=_disk(params.band_dilation))
        trimap = np.where(grown, 0.5, trimap)

    unknown = trimap == 0.5
    if not unknown.any():
        mask = (prob >= params.c_high).astype(np.uint8)
        return mask, AlphaMatte(alpha=trimap.copy()), trimap

    gray = to_grayscale(image)
    L = build_matting_laplacian(gray, params.matting, active=unknown)
    system = partition_system(L, trimap)
    alpha = solve_alpha(system, params.matting)
    mask = threshold_mask(alpha, params.mask_threshold)
    return mask, alpha, trimap

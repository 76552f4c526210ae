"""Synthetic weld-like instances for benchmarks and acceptance tests.

Each instance is a smooth random blob: a ground-truth mask, a grayscale
image with a soft high-contrast edge plus sensor noise, and a degraded
probability map imitating an under-confident segmentation network --
blurred, globally attenuated, perturbed with correlated lumps, and dented
with shallow dips that read as holes after naive 0.5 thresholding.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = ["SynthParams", "synth_instance"]


@dataclass(frozen=True)
class SynthParams:
    size: object = 128          # int for square, or (height, width)
    blur_sigma: float = 4.0     # boundary softness of the probability map
    prob_gain: float = 0.88     # global attenuation (boundary under-confidence)
    lump_sigma: float = 6.0     # correlation length of the lumpy error field
    lump_amp: float = 0.06      # stddev of the lumpy error field
    image_noise: float = 0.02
    max_holes: int = 2

    def __post_init__(self):
        if min(self.shape) < 16:
            raise ValueError("size must be >= 16")

    @property
    def shape(self):
        if np.isscalar(self.size):
            return int(self.size), int(self.size)
        h, w = self.size
        return int(h), int(w)


def _blob_mask(rng, shape):
    """Star-convex blob: radius modulated by a few random harmonics."""
    h, w = shape
    cy = h * (0.5 + rng.uniform(-0.06, 0.06))
    cx = w * (0.5 + rng.uniform(-0.06, 0.06))
    r0 = min(h, w) * rng.uniform(0.22, 0.3)
    amps = rng.uniform(-0.1, 0.1, size=4)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=4)
    yy, xx = np.mgrid[0:h, 0:w]
    theta = np.arctan2(yy - cy, xx - cx)
    radius = r0 * (
        1.0
        + sum(a * np.cos((k + 2) * theta + ph) for k, (a, ph) in enumerate(zip(amps, phases)))
    )
    dist = np.hypot(yy - cy, xx - cx)
    return (dist <= radius).astype(np.uint8)


def _lumps(rng, shape, sigma, amp):
    field = ndimage.gaussian_filter(rng.normal(0.0, 1.0, shape), sigma)
    std = field.std()
    if std > 0:
        field *= amp / std
    return field


def synth_instance(seed, params=SynthParams()):
    """Generate one (image, mask, prob) triple, deterministic in ``seed``."""
    rng = np.random.Generator(np.random.Philox(seed))
    shape = params.shape
    mask = _blob_mask(rng, shape)

    base = np.where(mask == 1, 0.75, 0.25)
    image = ndimage.gaussian_filter(base, 1.0)
    image = np.clip(image + rng.normal(0.0, params.image_noise, base.shape), 0.0, 1.0)

    prob = params.prob_gain * ndimage.gaussian_filter(mask.astype(np.float64), params.blur_sigma)
    prob += _lumps(rng, shape, params.lump_sigma, params.lump_amp)

    # shallow dips well inside the blob: deep enough to punch holes in a
    # naive 0.5 threshold, shallow enough to stay above the background lock
    interior = ndimage.binary_erosion(mask, iterations=6) if mask.any() else mask.astype(bool)
    candidates = np.flatnonzero(interior)
    n_holes = int(rng.integers(0, params.max_holes + 1))
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    for _ in range(n_holes):
        if candidates.size == 0:
            break
        pick = candidates[int(rng.integers(0, candidates.size))]
        hy, hx = divmod(pick, shape[1])
        depth = rng.uniform(0.38, 0.44)
        hole_sigma = rng.uniform(2.0, 3.0)
        prob -= depth * np.exp(-((yy - hy) ** 2 + (xx - hx) ** 2) / (2.0 * hole_sigma**2))

    prob = np.clip(prob, 0.0, 1.0)
    return image, mask, prob

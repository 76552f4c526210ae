"""Joint image/mask training-data augmentation.

An ordered list of stages, each activated independently with probability
``p`` from a counter-based generator (Philox) seeded per pair, so a fixed
seed reproduces the same output on any platform. Geometric stages move
image and mask identically (bilinear vs nearest-neighbor resampling, so
the mask stays binary); photometric stages touch the image only and clamp
to [0, 1].
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DegenerateCrop, DimensionMismatch
from .raster import check_binary_mask, check_image

__all__ = ["AugmentStage", "AugmentConfig", "augment_pair", "DEFAULT_STAGES"]

GEOMETRIC_OPS = ("hflip", "vflip", "rotate", "scale", "crop")
PHOTOMETRIC_OPS = ("brightness", "contrast", "noise")

# range semantics per op: rotate degrees, scale factor, crop kept fraction,
# brightness/contrast additive delta, noise stddev; flips take no range
_RANGED = {"rotate", "scale", "crop", "brightness", "contrast", "noise"}


@dataclass(frozen=True)
class AugmentStage:
    op: str
    p: float
    range: tuple = ()

    def __post_init__(self):
        if self.op not in GEOMETRIC_OPS + PHOTOMETRIC_OPS:
            raise ValueError(f"unknown op {self.op!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("activation probability must be in [0, 1]")
        rng = tuple(float(v) for v in self.range)
        object.__setattr__(self, "range", rng)
        if self.op in _RANGED:
            if len(rng) != 2 or rng[0] > rng[1]:
                raise ValueError(f"{self.op} needs range (lo, hi) with lo <= hi")
            if self.op == "scale" and rng[0] <= 0:
                raise ValueError("scale factors must be > 0")
            if self.op == "crop" and not 0 < rng[0] <= rng[1] <= 1:
                raise ValueError("crop fractions must be in (0, 1]")
            if self.op == "noise" and rng[0] < 0:
                raise ValueError("noise stddev must be >= 0")


DEFAULT_STAGES = (
    AugmentStage("hflip", 0.5),
    AugmentStage("vflip", 0.5),
    AugmentStage("rotate", 0.3, (-15.0, 15.0)),
    AugmentStage("scale", 0.3, (0.8, 1.2)),
    AugmentStage("brightness", 0.3, (-0.2, 0.2)),
    AugmentStage("contrast", 0.3, (-0.2, 0.2)),
    AugmentStage("noise", 0.2, (0.02, 0.02)),
)


@dataclass(frozen=True)
class AugmentConfig:
    seed: int = 0
    stages: tuple = field(default_factory=lambda: DEFAULT_STAGES)

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        stages = tuple(
            AugmentStage(s["op"], s["p"], tuple(s.get("range", ())))
            for s in doc.get("stages", [])
        )
        return cls(seed=int(doc.get("seed", 0)), stages=stages or DEFAULT_STAGES)

    def to_json(self):
        return json.dumps(
            {
                "seed": self.seed,
                "stages": [
                    {"op": s.op, "p": s.p, "range": list(s.range)} for s in self.stages
                ],
            },
            indent=2,
        )


def _rotate(img, mask, angle):
    kw = dict(reshape=False, mode="constant", cval=0.0)
    if img.ndim == 3:
        out = np.stack(
            [ndimage.rotate(img[:, :, c], angle, order=1, **kw) for c in range(3)],
            axis=2,
        )
    else:
        out = ndimage.rotate(img, angle, order=1, **kw)
    new_mask = ndimage.rotate(mask, angle, order=0, **kw)
    return np.clip(out, 0.0, 1.0), new_mask


def _scale(img, mask, factor):
    h, w = mask.shape
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    matrix = np.diag([1.0 / factor, 1.0 / factor])
    offset = center - center / factor
    kw = dict(matrix=matrix, offset=offset, output_shape=(h, w), mode="constant", cval=0.0)
    if img.ndim == 3:
        out = np.stack(
            [ndimage.affine_transform(img[:, :, c], order=1, **kw) for c in range(3)],
            axis=2,
        )
    else:
        out = ndimage.affine_transform(img, order=1, **kw)
    new_mask = ndimage.affine_transform(mask, order=0, **kw)
    return np.clip(out, 0.0, 1.0), new_mask


def _crop(img, mask, fraction, rng):
    h, w = mask.shape
    ch = int(round(fraction * h))
    cw = int(round(fraction * w))
    if ch < 1 or cw < 1:
        raise DegenerateCrop(f"crop window {ch}x{cw} from {h}x{w}")
    y0 = int(rng.integers(0, h - ch + 1))
    x0 = int(rng.integers(0, w - cw + 1))
    return img[y0 : y0 + ch, x0 : x0 + cw].copy(), mask[y0 : y0 + ch, x0 : x0 + cw].copy()


def _apply_stage(stage, img, mask, rng):
    if stage.op == "hflip":
        return img[:, ::-1].copy(), mask[:, ::-1].copy()
    if stage.op == "vflip":
        return img[::-1].copy(), mask[::-1].copy()
    if stage.op == "rotate":
        return _rotate(img, mask, rng.uniform(*stage.range))
    if stage.op == "scale":
        return _scale(img, mask, rng.uniform(*stage.range))
    if stage.op == "crop":
        return _crop(img, mask, rng.uniform(*stage.range), rng)
    if stage.op == "brightness":
        return np.clip(img + rng.uniform(*stage.range), 0.0, 1.0), mask
    if stage.op == "contrast":
        pivot = img.mean()
        factor = 1.0 + rng.uniform(*stage.range)
        return np.clip((img - pivot) * factor + pivot, 0.0, 1.0), mask
    if stage.op == "noise":
        sigma = rng.uniform(*stage.range)
        return np.clip(img + rng.normal(0.0, sigma, img.shape), 0.0, 1.0), mask
    raise AssertionError(stage.op)


def augment_pair(img, mask, cfg):
    """Run the configured stage list on an image/mask pair.

    Each stage draws one activation uniform; parameter draws happen only
    when the stage fires, in stage order, from a Philox stream seeded with
    ``cfg.seed``. Output mask is uint8 binary.
    """
    img = check_image(img)
    mask = check_binary_mask(mask)
    if img.shape[:2] != mask.shape:
        raise DimensionMismatch(f"image {img.shape[:2]} vs mask {mask.shape}")
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    for stage in cfg.stages:
        if rng.random() < stage.p:
            img, mask = _apply_stage(stage, img, mask, rng)
    return img, mask.astype(np.uint8)

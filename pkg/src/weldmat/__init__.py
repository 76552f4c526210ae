"""Weld segmentation post-processing toolkit.

Boundary heatmap ground truth generation, focal/boundary loss oracles,
closed-form matting refinement of probability maps, IoU evaluation, and a
seeded augmentation pipeline.
"""

from .augment import AugmentConfig, AugmentStage, DEFAULT_STAGES, augment_pair
from .errors import (
    DegenerateCrop,
    DimensionMismatch,
    EmptyBoundary,
    EmptyDataset,
    ImageTooSmall,
    InvariantViolation,
    LengthMismatch,
    MalformedHeader,
    NoKnownPixels,
    SolverDivergence,
    UnreadableFile,
    WeldmatError,
)
from .heatmap import (
    HeatmapParams,
    distance_transform,
    gaussian_heatmap,
    laplacian_boundary,
    make_heatmap_gt,
)
from .losses import LossParams, LossReport, boundary_mse, combined_loss, focal_loss
from .matting import (
    AlphaMatte,
    MattingParams,
    MattingSystem,
    build_matting_laplacian,
    energy,
    partition_system,
    solve_alpha,
)
from .metrics import EvalResult, ImageScore, evaluate, iou
from .raster import (
    check_binary_mask,
    check_image,
    check_prob_map,
    check_trimap,
    load_raster,
    read_wfr,
    save_raster,
    to_grayscale,
    write_wfr,
)
from .refine import RefineParams, build_trimap, refine, threshold_mask
from .synth import SynthParams, synth_instance

__version__ = "0.1.0"

# sklearn-backed wrappers load lazily so CLI startup skips the sklearn import
_LAZY_ESTIMATORS = ("BoundaryHeatmapGenerator", "MattingRefiner", "PairAugmenter")


def __getattr__(name):
    if name in _LAZY_ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "AugmentConfig",
    "AugmentStage",
    "DEFAULT_STAGES",
    "augment_pair",
    "AlphaMatte",
    "BoundaryHeatmapGenerator",
    "DegenerateCrop",
    "DimensionMismatch",
    "EmptyBoundary",
    "EmptyDataset",
    "EvalResult",
    "HeatmapParams",
    "ImageScore",
    "ImageTooSmall",
    "InvariantViolation",
    "LengthMismatch",
    "LossParams",
    "LossReport",
    "MalformedHeader",
    "MattingParams",
    "MattingRefiner",
    "MattingSystem",
    "NoKnownPixels",
    "PairAugmenter",
    "RefineParams",
    "SolverDivergence",
    "SynthParams",
    "UnreadableFile",
    "WeldmatError",
    "boundary_mse",
    "build_matting_laplacian",
    "build_trimap",
    "check_binary_mask",
    "check_image",
    "check_prob_map",
    "check_trimap",
    "combined_loss",
    "distance_transform",
    "energy",
    "evaluate",
    "focal_loss",
    "gaussian_heatmap",
    "iou",
    "laplacian_boundary",
    "load_raster",
    "make_heatmap_gt",
    "partition_system",
    "read_wfr",
    "refine",
    "save_raster",
    "solve_alpha",
    "synth_instance",
    "threshold_mask",
    "to_grayscale",
    "write_wfr",
    "__version__",
]

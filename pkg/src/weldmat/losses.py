"""Training-loss reference values and analytic gradients.

Focal loss for the segmentation head, mean squared error for the boundary
head, and their weighted combination. These are oracles for external
trainers: scalar values plus per-pixel gradients, deterministic reduction
order, no autograd involved.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .raster import check_binary_mask, check_prob_map

__all__ = ["LossParams", "LossReport", "focal_loss", "boundary_mse", "combined_loss"]

PROB_CLAMP = 1e-7


@dataclass(frozen=True)
class LossParams:
    w1: float = 0.8
    w2: float = 0.2
    alpha_t: float = 1.0
    gamma: float = 0.2

    def __post_init__(self):
        if not (self.w1 > 0 and self.w2 > 0 and self.alpha_t > 0):
            raise ValueError("w1, w2, alpha_t must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")


@dataclass(frozen=True)
class LossReport:
    focal: float
    boundary_mse: float
    combined: float
    grad_ps: np.ndarray
    grad_pb: np.ndarray


def focal_loss(ps, gs, alpha_t=1.0, gamma=0.2):
    """Mean focal loss of a predicted segmentation map against a binary mask.

    Per pixel: -alpha_t * (1 - p_t)**gamma * log(p_t), with p_t the
    predicted probability of the true class; probabilities are clamped to
    [1e-7, 1 - 1e-7] before the log. Returns the mean over all pixels and
    the per-pixel gradient of that mean with respect to ``ps``.
    """
    ps = check_prob_map(ps, name="ps")
    gs = check_binary_mask(gs, name="gs")
    if ps.shape != gs.shape:
        raise DimensionMismatch(f"ps {ps.shape} vs gs {gs.shape}")
    p = np.clip(ps, PROB_CLAMP, 1.0 - PROB_CLAMP)
    fg = gs == 1
    pt = np.where(fg, p, 1.0 - p)
    per_pixel = -alpha_t * (1.0 - pt) ** gamma * np.log(pt)
    n = ps.size
    # d/dp of the per-pixel loss; sign of the inner derivative flips on bg
    grad_fg = alpha_t * (gamma * (1.0 - p) ** (gamma - 1.0) * np.log(p) - (1.0 - p) ** gamma / p)
    grad_bg = -alpha_t * (gamma * p ** (gamma - 1.0) * np.log(1.0 - p) - p ** gamma / (1.0 - p))
    grad = np.where(fg, grad_fg, grad_bg) / n
    return float(per_pixel.mean()), grad


def boundary_mse(pb, hb):
    """Mean squared error between predicted and target boundary maps.

    Returns sum((pb - hb)**2) / (H*W) and the per-pixel gradient
    2 * (pb - hb) / (H*W).
    """
    pb = check_prob_map(pb, name="pb")
    hb = check_prob_map(hb, name="hb")
    if pb.shape != hb.shape:
        raise DimensionMismatch(f"pb {pb.shape} vs hb {hb.shape}")
    diff = pb - hb
    n = pb.size
    return float(np.sum(diff * diff) / n), 2.0 * diff / n


def combined_loss(ps, gs, pb, hb, params=LossParams()):
    """Weighted sum of the segmentation and boundary losses with gradients."""
    focal, grad_ps = focal_loss(ps, gs, params.alpha_t, params.gamma)
    mse, grad_pb = boundary_mse(pb, hb)
    return LossReport(
        focal=focal,
        boundary_mse=mse,
        combined=params.w1 * focal + params.w2 * mse,
        grad_ps=params.w1 * grad_ps,
        grad_pb=params.w2 * grad_pb,
    )

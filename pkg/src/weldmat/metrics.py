"""Intersection-over-union evaluation for binary masks."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, LengthMismatch
from .raster import check_binary_mask

__all__ = ["ImageScore", "EvalResult", "iou", "evaluate"]


@dataclass(frozen=True)
class ImageScore:
    iou_fg: float
    iou_bg: float
    miou: float


@dataclass(frozen=True)
class EvalResult:
    per_image: list
    dataset_miou: float
    aggregate: str = "macro"

    def to_dict(self):
        return {
            "per_image": [
                {"iou_fg": s.iou_fg, "iou_bg": s.iou_bg, "miou": s.miou}
                for s in self.per_image
            ],
            "dataset_miou": self.dataset_miou,
            "aggregate": self.aggregate,
        }


def iou(pred, gt, cls="fg"):
    """Intersection over union of one class; 1.0 when the union is empty."""
    if cls not in ("fg", "bg"):
        raise ValueError("cls must be 'fg' or 'bg'")
    pred = check_binary_mask(pred, name="pred")
    gt = check_binary_mask(gt, name="gt")
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"pred {pred.shape} vs gt {gt.shape}")
    value = 1 if cls == "fg" else 0
    p = pred == value
    g = gt == value
    union = np.logical_or(p, g).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(p, g).sum() / union)


def _pair_counts(pred, gt, value):
    p = pred == value
    g = gt == value
    return int(np.logical_and(p, g).sum()), int(np.logical_or(p, g).sum())


def evaluate(preds, gts, aggregate="macro"):
    """Score a list of predictions against ground truths.

    Per image: the mean of foreground and background IoU. The dataset
    summary is the macro mean of per-image scores, or, with
    ``aggregate="global"``, the class IoUs over the pooled pixels of the
    whole dataset averaged across the two classes.
    """
    if aggregate not in ("macro", "global"):
        raise ValueError("aggregate must be 'macro' or 'global'")
    preds = list(preds)
    gts = list(gts)
    if len(preds) != len(gts):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(gts)} ground truths")
    if not preds:
        raise EmptyDataset("nothing to evaluate")

    per_image = []
    pooled = {1: [0, 0], 0: [0, 0]}  # class -> [intersection, union]
    for k, (pred, gt) in enumerate(zip(preds, gts)):
        pred = check_binary_mask(pred, name=f"pred[{k}]")
        gt = check_binary_mask(gt, name=f"gt[{k}]")
        if pred.shape != gt.shape:
            raise DimensionMismatch(f"pair {k}: pred {pred.shape} vs gt {gt.shape}")
        scores = {}
        for cls, value in (("fg", 1), ("bg", 0)):
            inter, union = _pair_counts(pred, gt, value)
            pooled[value][0] += inter
            pooled[value][1] += union
            scores[cls] = 1.0 if union == 0 else inter / union
        per_image.append(
            ImageScore(scores["fg"], scores["bg"], (scores["fg"] + scores["bg"]) / 2.0)
        )

    if aggregate == "macro":
        dataset = float(np.mean([s.miou for s in per_image]))
    else:
        class_ious = [
            1.0 if union == 0 else inter / union for inter, union in pooled.values()
        ]
        dataset = float(np.mean(class_ious))
    return EvalResult(per_image=per_image, dataset_miou=dataset, aggregate=aggregate)

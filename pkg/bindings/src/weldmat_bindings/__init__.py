"""Array-level bindings for the weldmat toolkit.

Four entry points for training loops that already hold image data in
memory: ``make_heatmap_gt``, ``combined_loss``, ``build_trimap``, and
``refine``. Everything takes contiguous numpy arrays and returns float64
(masks as uint8). No math lives here; each call validates its inputs and
hands them to the installed ``weldmat`` package, so results match the CLI
on the same data exactly.

float32 inputs are upcast to float64 at the boundary; float64 C-contiguous
arrays pass through without copying.
"""

import numpy as np

import weldmat as _wm

__version__ = _wm.__version__

__all__ = ["make_heatmap_gt", "combined_loss", "build_trimap", "refine", "__version__"]


def _as_float64(arr):
    a = np.asarray(arr)
    if a.dtype != np.float64:
        a = a.astype(np.float64)
    return a if a.flags.c_contiguous else np.ascontiguousarray(a)


def make_heatmap_gt(mask, sigma=3.0, edge_threshold=0.1):
    """Boundary heatmap target for a binary mask array.

    Raises on non-binary input; an all-constant mask yields zeros.
    """
    params = _wm.HeatmapParams(sigma=sigma, edge_threshold=edge_threshold)
    return _wm.make_heatmap_gt(np.asarray(mask), params)


def combined_loss(ps, gs, pb, hb, params=None):
    """Loss scalars and per-pixel gradients for a prediction pair.

    Returns the weldmat ``LossReport``: focal, boundary_mse, combined, and
    the gradient arrays already scaled by the combination weights.
    """
    if params is None:
        params = _wm.LossParams()
    return _wm.combined_loss(
        _as_float64(ps),
        np.asarray(gs),
        _as_float64(pb),
        _as_float64(hb),
        params,
    )


def build_trimap(prob, c_high=0.46, c_low=0.38):
    """Three-level {0, 0.5, 1} trimap from a probability array."""
    return _wm.build_trimap(_as_float64(prob), c_high=c_high, c_low=c_low)


def refine(image, prob, params=None):
    """Matting-refined binary mask and raw alpha for an image/probability pair.

    Returns ``(mask, alpha)`` as uint8 and float64 arrays. Degenerate
    trimaps and solver failures propagate as weldmat exceptions.
    """
    if params is None:
        params = _wm.RefineParams()
    mask, matte, _ = _wm.refine(_as_float64(image), _as_float64(prob), params)
    return mask, matte.alpha

"""sklearn-style wrappers around the functional core.

All three estimators are stateless: ``fit`` only validates parameters and
returns ``self``, so they clone, grid-search, and ``set_params`` like any
other sklearn estimator while the heavy lifting stays in the plain
functions.
"""

from sklearn.base import BaseEstimator, TransformerMixin

from .augment import DEFAULT_STAGES, AugmentConfig, augment_pair
from .heatmap import HeatmapParams, make_heatmap_gt
from .matting import MattingParams
from .refine import RefineParams, refine

__all__ = ["BoundaryHeatmapGenerator", "MattingRefiner", "PairAugmenter"]


class BoundaryHeatmapGenerator(BaseEstimator, TransformerMixin):
    """Turn binary segmentation masks into boundary heatmap targets.

    Parameters
    ----------
    sigma : float, default=3.0
        Width of the Gaussian falloff (cut off at 3*sigma).
    edge_threshold : float, default=0.1
        Laplacian response above which a pixel counts as boundary.
    """

    def __init__(self, sigma=3.0, edge_threshold=0.1):
        self.sigma = sigma
        self.edge_threshold = edge_threshold

    def _params(self):
        return HeatmapParams(sigma=self.sigma, edge_threshold=self.edge_threshold)

    def fit(self, X=None, y=None):
        self._params()
        return self

    def transform(self, X):
        """A single (H, W) mask yields a heatmap; an iterable yields a list."""
        params = self._params()
        if hasattr(X, "ndim") and X.ndim == 2:
            return make_heatmap_gt(X, params)
        return [make_heatmap_gt(m, params) for m in X]


class MattingRefiner(BaseEstimator):
    """Refine probability maps into binary masks via constrained matting."""

    def __init__(
        self,
        c_high=0.46,
        c_low=0.38,
        epsilon=1e-7,
        solver_tol=1e-6,
        max_iters=2000,
        mask_threshold=0.5,
        band_dilation=0,
    ):
        self.c_high = c_high
        self.c_low = c_low
        self.epsilon = epsilon
        self.solver_tol = solver_tol
        self.max_iters = max_iters
        self.mask_threshold = mask_threshold
        self.band_dilation = band_dilation

    def _params(self):
        return RefineParams(
            c_high=self.c_high,
            c_low=self.c_low,
            matting=MattingParams(
                epsilon=self.epsilon,
                solver_tol=self.solver_tol,
                max_iters=self.max_iters,
            ),
            mask_threshold=self.mask_threshold,
            band_dilation=self.band_dilation,
        )

    def fit(self, X=None, y=None):
        self._params()
        return self

    def predict(self, image, prob):
        """Binary mask for one image / probability-map pair."""
        mask, _, _ = refine(image, prob, self._params())
        return mask

    def refine(self, image, prob):
        """Full pipeline output: (mask, alpha, trimap)."""
        return refine(image, prob, self._params())


class PairAugmenter(BaseEstimator):
    """Seeded joint augmentation of an image and its mask."""

    def __init__(self, seed=0, stages=DEFAULT_STAGES):
        self.seed = seed
        self.stages = stages

    def fit(self, X=None, y=None):
        AugmentConfig(seed=self.seed, stages=self.stages)
        return self

    def transform(self, image, mask):
        cfg = AugmentConfig(seed=self.seed, stages=self.stages)
        return augment_pair(image, mask, cfg)

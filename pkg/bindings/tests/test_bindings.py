import math

import numpy as np
import pytest

import weldmat
import weldmat_bindings as wb
from weldmat import DimensionMismatch, InvariantViolation, NoKnownPixels


class TestHeatmap:
    def test_empty_mask_gives_zeros(self):
        heat = wb.make_heatmap_gt(np.zeros((12, 12)))
        assert heat.shape == (12, 12)
        assert not heat.any()

    def test_non_binary_rejected(self):
        with pytest.raises(InvariantViolation):
            wb.make_heatmap_gt(np.full((4, 4), 0.5))

    def test_sigma_flows_through(self):
        mask = np.zeros((16, 16), np.uint8)
        mask[6:10, 6:10] = 1
        narrow = wb.make_heatmap_gt(mask, sigma=1.0)
        wide = wb.make_heatmap_gt(mask, sigma=4.0)
        assert (wide > 0).sum() > (narrow > 0).sum()


class TestCombinedLoss:
    def test_one_pixel_focal(self):
        report = wb.combined_loss(
            np.array([[0.5]]), np.array([[1]]), np.array([[0.2]]), np.array([[0.2]])
        )
        assert report.focal == pytest.approx((0.5**0.2) * math.log(2.0), abs=1e-12)
        assert report.focal == pytest.approx(0.60342, abs=1e-5)

    def test_perfect_prediction(self):
        gs = np.array([[1, 0]], np.uint8)
        hb = np.array([[0.3, 0.6]])
        report = wb.combined_loss(gs.astype(np.float64), gs, hb, hb)
        assert report.combined < 1e-6

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            wb.combined_loss(
                np.zeros((2, 2)), np.zeros((3, 3), np.uint8),
                np.zeros((2, 2)), np.zeros((2, 2)),
            )

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        ps = rng.uniform(0.1, 0.9, (5, 5))
        gs = (rng.random((5, 5)) < 0.5).astype(np.uint8)
        pb = rng.uniform(0.1, 0.9, (5, 5))
        hb = rng.uniform(0.1, 0.9, (5, 5))
        report = wb.combined_loss(ps, gs, pb, hb)
        h = 1e-5
        for i in range(5):
            for j in range(5):
                hi = ps.copy(); hi[i, j] += h
                lo = ps.copy(); lo[i, j] -= h
                fd = (wb.combined_loss(hi, gs, pb, hb).combined
                      - wb.combined_loss(lo, gs, pb, hb).combined) / (2 * h)
                assert abs(report.grad_ps[i, j] - fd) / max(abs(fd), 1e-12) < 1e-4

    def test_float32_upcast_matches_float64(self):
        rng = np.random.default_rng(8)
        ps64 = rng.uniform(0.1, 0.9, (6, 6)).astype(np.float32).astype(np.float64)
        gs = (rng.random((6, 6)) < 0.5).astype(np.uint8)
        hb64 = rng.uniform(0.1, 0.9, (6, 6)).astype(np.float32).astype(np.float64)
        a = wb.combined_loss(ps64.astype(np.float32), gs, ps64.astype(np.float32), hb64.astype(np.float32))
        b = wb.combined_loss(ps64, gs, ps64, hb64)
        assert a.combined == b.combined
        assert np.array_equal(a.grad_ps, b.grad_ps)


class TestBuildTrimap:
    def test_levels(self):
        tri = wb.build_trimap(np.array([[0.9, 0.2, 0.42]]))
        assert tri.tolist() == [[1.0, 0.0, 0.5]]

    def test_custom_thresholds(self):
        tri = wb.build_trimap(np.array([[0.55]]), c_high=0.6, c_low=0.5)
        assert tri[0, 0] == 0.5


class TestRefine:
    def test_returns_mask_and_alpha(self):
        rng = np.random.default_rng(9)
        image = rng.random((10, 10))
        prob = (rng.random((10, 10)) < 0.5).astype(np.float64)
        mask, alpha = wb.refine(image, prob)
        assert mask.dtype == np.uint8
        assert alpha.dtype == np.float64
        assert np.array_equal(mask, prob.astype(np.uint8))

    def test_degenerate_trimap_propagates(self):
        with pytest.raises(NoKnownPixels):
            wb.refine(np.full((6, 6), 0.5), np.full((6, 6), 0.42))

    def test_custom_params(self):
        rng = np.random.default_rng(10)
        image = rng.random((8, 8))
        prob = np.clip(rng.random((8, 8)), 0, 1)
        params = weldmat.RefineParams(c_high=0.9, c_low=0.1)
        mask, alpha = wb.refine(image, prob, params)
        assert mask.shape == (8, 8)


def test_version_mirrors_primary():
    assert wb.__version__ == weldmat.__version__

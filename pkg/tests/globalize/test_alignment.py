"""Tests for scale/shift alignment."""

import numpy as np
import pytest

from chainlens.globalize import ScaleShift, scale_shift_fit
from chainlens.raster import FloatRaster


class TestScaleShiftFit:
    """Tests for scale_shift_fit."""

    def test_recovers_affine_map(self):
        """Test an exact affine relation."""
        relative = np.arange(12, dtype=np.float64).reshape(3, 4)
        fit = scale_shift_fit(relative, 2.5 * relative - 4.0)
        assert fit.scale == pytest.approx(2.5)
        assert fit.shift == pytest.approx(-4.0)
        assert not fit.degenerate

    def test_invalid_pixels_ignored(self):
        """Test that masked ground-truth pixels do not pull the fit."""
        relative = FloatRaster(np.array([[0.0, 1.0, 2.0]], dtype=np.float32))
        gt = FloatRaster(
            np.array([[1.0, 3.0, 99.0]], dtype=np.float32),
            valid=np.array([[True, True, False]]),
        )
        fit = scale_shift_fit(relative, gt)
        assert (fit.scale, fit.shift) == pytest.approx((2.0, 1.0))

    def test_constant_relative(self):
        """Test the degenerate case: zero scale, mean shift."""
        fit = scale_shift_fit(np.ones((2, 2)), np.array([[1.0, 2.0], [3.0, 6.0]]))
        assert fit == ScaleShift(0.0, 3.0, degenerate=True)

    def test_apply(self):
        """Test applying the map to a raster."""
        out = ScaleShift(2.0, 1.0).apply(FloatRaster(np.array([[0.0, 3.0]], dtype=np.float32)))
        assert out.values.tolist() == [[1.0, 7.0]]

    def test_too_few_pixels(self):
        """Test that one usable pixel is not enough."""
        with pytest.raises(ValueError):
            scale_shift_fit(np.array([[1.0, np.nan]]), np.array([[1.0, 2.0]]))

    def test_shape_mismatch(self):
        """Test differently sized inputs."""
        with pytest.raises(ValueError):
            scale_shift_fit(np.zeros((2, 2)), np.zeros((2, 3)))

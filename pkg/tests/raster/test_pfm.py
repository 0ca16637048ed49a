"""Tests for PFM reading and writing."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chainlens.errors import PfmFormatError
from chainlens.raster import FloatRaster, read_pfm, write_pfm


class TestPfm:
    """Tests for the PFM codec."""

    def test_bottom_row_first(self, tmp_path):
        """Test that the first stored row is the bottom image row."""
        raster = FloatRaster(np.array([[1.0, 2.0], [3.0, 4.0]], dtype=np.float32))
        path = tmp_path / "a.pfm"
        write_pfm(raster, path)
        data = path.read_bytes()
        header = b"Pf\n2 2\n-1.0\n"
        assert data.startswith(header)
        first = struct.unpack("<f", data[len(header) : len(header) + 4])[0]
        assert first == 3.0

    def test_big_endian_input(self, tmp_path):
        """Test reading a positive-scale (big-endian) file."""
        path = tmp_path / "be.pfm"
        payload = np.array([[7.5, -1.0]], dtype=">f4").tobytes()
        path.write_bytes(b"Pf\n2 1\n1.0\n" + payload)
        raster = read_pfm(path)
        assert raster.values.tolist() == [[7.5, -1.0]]

    def test_invalid_pixels_become_nan_and_back(self, tmp_path):
        """Test that validity survives the file."""
        valid = np.array([[True, False, True]])
        raster = FloatRaster(np.array([[1.0, 0.0, 2.0]], dtype=np.float32), valid=valid)
        write_pfm(raster, tmp_path / "v.pfm")
        again = read_pfm(tmp_path / "v.pfm")
        assert np.array_equal(again.validity(), valid)
        assert again == raster

    def test_color_pfm_rejected(self, tmp_path):
        """Test that three-channel files are refused."""
        path = tmp_path / "c.pfm"
        path.write_bytes(b"PF\n1 1\n-1.0\n" + b"\0" * 12)
        with pytest.raises(PfmFormatError, match="Color"):
            read_pfm(path)

    def test_truncated_payload(self, tmp_path):
        """Test that a short payload is reported."""
        path = tmp_path / "t.pfm"
        path.write_bytes(b"Pf\n2 2\n-1.0\n" + b"\0" * 8)
        with pytest.raises(PfmFormatError, match="Truncated"):
            read_pfm(path)

    def test_bad_header(self, tmp_path):
        """Test that garbage dimensions are reported."""
        path = tmp_path / "h.pfm"
        path.write_bytes(b"Pf\ntwo 2\n-1.0\n")
        with pytest.raises(PfmFormatError):
            read_pfm(path)

    @settings(max_examples=25, deadline=None)
    @given(arrays(np.float32, st.tuples(st.integers(1, 6), st.integers(1, 6)),
                  elements=st.floats(-1e6, 1e6, width=32)))
    def test_round_trip(self, tmp_path_factory, values):
        """Test that finite rasters come back bit-exact."""
        path = tmp_path_factory.mktemp("pfm") / "r.pfm"
        write_pfm(FloatRaster(values), path)
        assert np.array_equal(read_pfm(path).values, values)

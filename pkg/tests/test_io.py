import numpy as np
import pytest

from barseg.core import Annotation
from barseg.errors import FormatError
from barseg.io import (
    read_annotation,
    read_boundaries,
    read_matrix,
    write_annotation,
    write_boundaries,
    write_matrix,
)


def npy_bytes(descr, fortran_order, shape, payload):
    """Hand-assembled NPY v1.0 file, independent of numpy's writer."""
    header = (
        f"{{'descr': {descr!r}, 'fortran_order': {fortran_order}, "
        f"'shape': {shape!r}, }}"
    )
    body = header.encode("latin1")
    total = 10 + len(body) + 1
    pad = (64 - total % 64) % 64
    body = body + b" " * pad + b"\n"
    return b"\x93NUMPY\x01\x00" + len(body).to_bytes(2, "little") + body + payload


class TestNpy:
    def test_reads_f4_matrix(self, tmp_path):
        values = np.arange(6, dtype="<f4").reshape(2, 3)
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<f4", False, (2, 3), values.tobytes()))
        out = read_matrix(path)
        assert out.dtype == np.float64
        assert np.array_equal(out, values.astype(np.float64))

    def test_reads_f8_matrix(self, tmp_path):
        values = np.linspace(0, 1, 8).reshape(4, 2)
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<f8", False, (4, 2), values.tobytes()))
        assert np.array_equal(read_matrix(path), values)

    def test_rejects_fortran_order(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<f4", True, (2, 2), b"\x00" * 16))
        with pytest.raises(FormatError, match="fortran_order"):
            read_matrix(path)

    def test_rejects_wrong_dtype(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<i4", False, (2, 2), b"\x00" * 16))
        with pytest.raises(FormatError, match="descr"):
            read_matrix(path)

    def test_rejects_1d_shape(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<f4", False, (4,), b"\x00" * 16))
        with pytest.raises(FormatError, match="2-D"):
            read_matrix(path)

    def test_truncated_data_reports_offset(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(npy_bytes("<f4", False, (2, 3), b"\x00" * 12))
        with pytest.raises(FormatError, match="truncated") as err:
            read_matrix(path)
        assert err.value.offset is not None

    def test_rejects_unknown_version(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(b"\x93NUMPY\x02\x00" + b"\x00" * 32)
        with pytest.raises(FormatError, match="version"):
            read_matrix(path)

    def test_write_matrix_roundtrips_through_numpy(self, tmp_path):
        values = np.random.default_rng(0).normal(size=(5, 7))
        path = tmp_path / "m.npy"
        write_matrix(path, values)
        assert path.read_bytes()[:8] == b"\x93NUMPY\x01\x00"
        via_numpy = np.load(path)
        assert via_numpy.dtype == np.float32
        assert np.allclose(read_matrix(path), values, atol=1e-6)
        assert np.array_equal(read_matrix(path), via_numpy.astype(np.float64))

    def test_reads_numpy_save_output(self, tmp_path):
        values = np.random.default_rng(1).normal(size=(3, 4)).astype(np.float32)
        path = tmp_path / "m.npy"
        np.save(path, values)
        assert np.array_equal(read_matrix(path), values.astype(np.float64))


class TestCsv:
    def test_plain_csv(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        assert np.array_equal(read_matrix(path), [[1.0, 2.0], [3.0, 4.0]])

    def test_headered_csv(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("dim0,dim1\n1.5,2.5\n3.5,4.5\n")
        assert np.array_equal(read_matrix(path), [[1.5, 2.5], [3.5, 4.5]])

    def test_ragged_csv_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(FormatError, match="ragged"):
            read_matrix(path)

    def test_non_numeric_body_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\nx,4\n")
        with pytest.raises(FormatError):
            read_matrix(path)


class TestTextFormats:
    def test_boundaries_roundtrip(self, tmp_path):
        path = tmp_path / "b.txt"
        write_boundaries(path, [0.0, 12.345678, 60.0])
        assert np.allclose(read_boundaries(path), [0.0, 12.345678, 60.0])
        assert path.read_text().splitlines()[1] == "12.345678"

    def test_floats_reject_garbage(self, tmp_path):
        path = tmp_path / "b.txt"
        path.write_text("1.0\nnope\n")
        with pytest.raises(FormatError):
            read_boundaries(path)

    def test_annotation_roundtrip(self, tmp_path):
        ann = Annotation(((0.0, 1.5, "silence"), (1.5, 60.0, "A"), (60.0, 61.0, "end")))
        path = tmp_path / "a.tsv"
        write_annotation(path, ann)
        back = read_annotation(path)
        assert back.segments == ann.segments

    def test_annotation_needs_three_columns(self, tmp_path):
        path = tmp_path / "a.tsv"
        path.write_text("0.0\t1.0\n")
        with pytest.raises(FormatError):
            read_annotation(path)

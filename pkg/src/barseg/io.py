"""File formats shared with the extraction sidecar and the reports.

Everything is deliberately plain: NPY v1.0 (or headered CSV) for matrices,
one float per line for downbeats and boundaries, and three tab-separated
columns for annotations.
"""
from __future__ import annotations

import ast

import numpy as np
import numpy.lib.format

from .core import Annotation
from .errors import FormatError, InvalidInput

_NPY_MAGIC = b"\x93NUMPY"
_SUPPORTED_DESCR = ("<f4", "<f8")


def read_matrix(path) -> np.ndarray:
    """Load a B x D matrix from an NPY v1.0 or CSV file, widened to float64."""
    with open(path, "rb") as f:
        head = f.read(len(_NPY_MAGIC))
        if head == _NPY_MAGIC:
            return _read_npy_body(f)
    return _read_csv(path)


def _read_npy_body(f) -> np.ndarray:
    version = f.read(2)
    if version != b"\x01\x00":
        raise FormatError(f"unsupported NPY version {version!r}", offset=6)
    raw_len = f.read(2)
    if len(raw_len) != 2:
        raise FormatError("truncated NPY header length", offset=8)
    header_len = int.from_bytes(raw_len, "little")
    header_bytes = f.read(header_len)
    if len(header_bytes) != header_len:
        raise FormatError("truncated NPY header", offset=10)
    try:
        header = ast.literal_eval(header_bytes.decode("latin1").strip())
    except (SyntaxError, ValueError):
        raise FormatError("unparseable NPY header dict", offset=10) from None
    if not isinstance(header, dict):
        raise FormatError("NPY header is not a dict", offset=10)

    descr = header.get("descr")
    if descr not in _SUPPORTED_DESCR:
        raise FormatError(
            f"unsupported dtype descr {descr!r}; need little-endian float32/float64",
            offset=10,
        )
    if header.get("fortran_order") is not False:
        raise FormatError("fortran_order matrices are not supported", offset=10)
    shape = header.get("shape")
    if not (isinstance(shape, tuple) and len(shape) == 2):
        raise FormatError(f"need a 2-D shape, got {shape!r}", offset=10)

    dtype = np.dtype(descr)
    count = int(shape[0]) * int(shape[1])
    data = f.read(count * dtype.itemsize)
    if len(data) != count * dtype.itemsize:
        raise FormatError(
            f"truncated data: expected {count * dtype.itemsize} bytes, "
            f"got {len(data)}",
            offset=10 + header_len + len(data),
        )
    return np.frombuffer(data, dtype=dtype).reshape(shape).astype(np.float64)


def _read_csv(path) -> np.ndarray:
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("neither NPY magic nor decodable text", offset=exc.start)

    rows = []
    width = None
    offset = 0
    for lineno, line in enumerate(text.splitlines(keepends=True)):
        stripped = line.strip()
        if stripped:
            cells = stripped.split(",")
            try:
                row = [float(c) for c in cells]
            except ValueError:
                if lineno == 0:  # headered CSV: skip a non-numeric first row
                    offset += len(line.encode("utf-8"))
                    continue
                raise FormatError(
                    f"non-numeric CSV cell on line {lineno + 1}", offset=offset
                ) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise FormatError(
                    f"ragged CSV: line {lineno + 1} has {len(row)} cells, "
                    f"expected {width}",
                    offset=offset,
                )
            rows.append(row)
        offset += len(line.encode("utf-8"))
    if not rows:
        raise FormatError("CSV contains no numeric rows", offset=0)
    return np.asarray(rows, dtype=np.float64)


def write_matrix(path, values) -> None:
    """Write a matrix as NPY v1.0, little-endian float32, C order."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise InvalidInput("only 2-D matrices are written")
    with open(path, "wb") as f:
        numpy.lib.format.write_array(f, arr, version=(1, 0))


def read_floats(path) -> np.ndarray:
    """Read one float per line (downbeats, boundary files)."""
    values = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise FormatError(
                    f"{path}: line {lineno} is not a float: {line!r}"
                ) from None
    return np.asarray(values, dtype=np.float64)


def write_floats(path, values) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in np.asarray(values, dtype=np.float64):
            f.write(f"{v:.6f}\n")


read_downbeats = read_floats
write_downbeats = write_floats
read_boundaries = read_floats
write_boundaries = write_floats


def read_annotation(path) -> Annotation:
    """Read a start<TAB>end<TAB>label annotation file."""
    segments = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    f"{path}: line {lineno} needs 3 tab-separated columns"
                )
            try:
                start, end = float(parts[0]), float(parts[1])
            except ValueError:
                raise FormatError(
                    f"{path}: line {lineno} has non-numeric times"
                ) from None
            segments.append((start, end, parts[2]))
    if not segments:
        raise FormatError(f"{path}: annotation file is empty")
    return Annotation(tuple(segments))


def write_annotation(path, ann: Annotation) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for start, end, label in ann.segments:
            f.write(f"{start:.6f}\t{end:.6f}\t{label}\n")

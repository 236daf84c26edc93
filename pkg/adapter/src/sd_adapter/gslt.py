"""GSLT latent-tensor files, the interchange format with the watermark tool.

Layout: magic bytes ``GSLT``, version byte 0x01, the dimensions c, h, w as
32-bit little-endian unsigned integers, then c*h*w IEEE-754 float32
little-endian values in C order of (c, h, w).  This is an independent
implementation of the published format; interoperability with the
watermark tool is covered by the test suite.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import AdapterError

MAGIC = b"GSLT"
VERSION = 1
_HEADER = struct.Struct("<4sBIII")


def write_gslt(path, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 3:
        raise AdapterError(f"latent tensor must be (c, h, w), got shape {values.shape}")
    if not np.isfinite(values).all():
        raise AdapterError("latent tensor contains non-finite values")
    c, h, w = values.shape
    header = _HEADER.pack(MAGIC, VERSION, c, h, w)
    Path(path).write_bytes(header + values.astype("<f4").tobytes(order="C"))


def read_gslt(path) -> np.ndarray:
    """Read a GSLT file; float32 contents widen losslessly to float64."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise AdapterError(f"{path}: truncated GSLT header")
    magic, version, c, h, w = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise AdapterError(f"{path}: bad magic {magic!r}, not a GSLT file")
    if version != VERSION:
        raise AdapterError(f"{path}: unsupported GSLT version {version}")
    expected = _HEADER.size + 4 * c * h * w
    if len(blob) != expected:
        raise AdapterError(f"{path}: expected {expected} bytes, got {len(blob)}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.astype(np.float64).reshape(c, h, w)

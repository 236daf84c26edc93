import struct
import subprocess
import sys

import numpy as np
import pytest

from sd_adapter import AdapterError, read_gslt, write_gslt


def test_round_trip_preserves_float32_values(tmp_path, rng):
    z = rng.standard_normal((4, 8, 8))
    path = tmp_path / "z.gslt"
    write_gslt(path, z)
    back = read_gslt(path)
    assert np.array_equal(back, z.astype("<f4").astype(np.float64))


def test_header_layout(tmp_path):
    path = tmp_path / "z.gslt"
    write_gslt(path, np.zeros((2, 3, 4)))
    blob = path.read_bytes()
    assert blob[:5] == b"GSLT\x01"
    assert struct.unpack("<III", blob[5:17]) == (2, 3, 4)


def test_rejects_malformed(tmp_path):
    path = tmp_path / "bad.gslt"
    path.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(AdapterError, match="magic"):
        read_gslt(path)
    path.write_bytes(b"GSLT\x07" + struct.pack("<III", 1, 1, 1) + bytes(4))
    with pytest.raises(AdapterError, match="version"):
        read_gslt(path)
    with pytest.raises(AdapterError, match="c, h, w"):
        write_gslt(path, np.zeros((4, 4)))


def test_interop_with_the_watermark_tool(tmp_path, rng):
    # files written by the primary tool parse bit-exactly here and back
    key = tmp_path / "key.cfg"
    theirs = tmp_path / "theirs.gslt"
    subprocess.run(
        [sys.executable, "-m", "latentmark", "keygen", "--out", str(key),
         "--cfg", "4x64x64,fc=1,fhw=8,l=1", "--seed", "5"],
        check=True, capture_output=True,
    )
    subprocess.run(
        [sys.executable, "-m", "latentmark", "embed", "--key", str(key),
         "--payload-random", "--out", str(theirs), "--seed", "6"],
        check=True, capture_output=True,
    )
    values = read_gslt(theirs)
    rewritten = tmp_path / "rewritten.gslt"
    write_gslt(rewritten, values)
    assert rewritten.read_bytes() == theirs.read_bytes()

    # and a file written here is accepted by the primary tool byte for byte
    mine = tmp_path / "mine.gslt"
    write_gslt(mine, rng.standard_normal((4, 64, 64)))
    proc = subprocess.run(
        [sys.executable, "-m", "latentmark", "extract", "--key", str(key), "--in", str(mine)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("k=256")

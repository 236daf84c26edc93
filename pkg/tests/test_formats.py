import struct

import numpy as np
import pytest

import latentmark as lm
from latentmark import CapacityConfig, FormatError, KeyMaterial, RegistryEntry, UserRegistry
from latentmark.formats import payload_from_hex, payload_to_hex


def test_gslt_round_trip_preserves_float32_values(tmp_path):
    rng = np.random.default_rng(80)
    z = rng.standard_normal((4, 8, 8))
    path = tmp_path / "z.gslt"
    lm.write_gslt(path, z)
    back = lm.read_gslt(path)
    assert back.shape == (4, 8, 8)
    assert np.array_equal(back, z.astype("<f4").astype(np.float64))


def test_gslt_header_layout(tmp_path):
    z = np.zeros((2, 3, 5))
    path = tmp_path / "z.gslt"
    lm.write_gslt(path, z)
    blob = path.read_bytes()
    assert blob[:4] == b"GSLT"
    assert blob[4] == 1
    assert struct.unpack("<III", blob[5:17]) == (2, 3, 5)
    assert len(blob) == 17 + 4 * 2 * 3 * 5


def test_gslt_write_read_write_is_byte_identical(tmp_path):
    rng = np.random.default_rng(81)
    first = tmp_path / "a.gslt"
    second = tmp_path / "b.gslt"
    lm.write_gslt(first, rng.standard_normal((4, 4, 4)))
    lm.write_gslt(second, lm.read_gslt(first))
    assert first.read_bytes() == second.read_bytes()


def test_gslt_rejects_malformed_files(tmp_path):
    path = tmp_path / "bad.gslt"
    path.write_bytes(b"NOPE" + bytes(13))
    with pytest.raises(FormatError, match="magic"):
        lm.read_gslt(path)
    path.write_bytes(b"GSLT" + bytes([9]) + struct.pack("<III", 1, 1, 1) + bytes(4))
    with pytest.raises(FormatError, match="version"):
        lm.read_gslt(path)
    path.write_bytes(b"GSLT" + bytes([1]) + struct.pack("<III", 1, 1, 2) + bytes(4))
    with pytest.raises(FormatError, match="expected"):
        lm.read_gslt(path)
    path.write_bytes(b"GS")
    with pytest.raises(FormatError, match="truncated"):
        lm.read_gslt(path)


def test_gslt_rejects_bad_tensors(tmp_path):
    with pytest.raises(ValueError):
        lm.write_gslt(tmp_path / "x.gslt", np.zeros((4, 4)))
    with pytest.raises(ValueError):
        lm.write_gslt(tmp_path / "x.gslt", np.full((1, 1, 1), np.nan))


def test_key_record_round_trip(tmp_path):
    material = KeyMaterial.generate(np.random.default_rng(82))
    cfg = CapacityConfig(4, 64, 64, f_c=2, f_hw=4, l=2)
    path = tmp_path / "key.cfg"
    lm.write_key_record(path, material, cfg)
    material2, cfg2 = lm.read_key_record(path)
    assert material2 == material
    assert cfg2 == cfg


def test_key_record_rejects_malformed(tmp_path):
    path = tmp_path / "key.cfg"
    good = dict(key="00" * 32, nonce="11" * 12, c=4, h=64, w=64, f_c=1, f_hw=8, l=1)

    def write(**overrides):
        fields = {**good, **overrides}
        path.write_text("".join(f"{k} = {v}\n" for k, v in fields.items() if v is not None))

    write(key="zz" * 32)
    with pytest.raises(FormatError, match="hex"):
        lm.read_key_record(path)
    write(key="00" * 31)
    with pytest.raises(FormatError, match="32 bytes"):
        lm.read_key_record(path)
    write(nonce=None)
    with pytest.raises(FormatError, match="missing"):
        lm.read_key_record(path)
    write(extra="1")
    with pytest.raises(FormatError, match="unknown"):
        lm.read_key_record(path)
    path.write_text("key\n")
    with pytest.raises(FormatError, match="name = value"):
        lm.read_key_record(path)
    path.write_text(f"key = {'00' * 32}\nkey = {'00' * 32}\n")
    with pytest.raises(FormatError, match="duplicate"):
        lm.read_key_record(path)


def test_payload_hex_round_trip():
    rng = np.random.default_rng(83)
    for k in (256, 8, 5, 1):
        bits = rng.integers(0, 2, k, dtype=np.uint8)
        assert np.array_equal(payload_from_hex(payload_to_hex(bits), k), bits)


def test_payload_file_round_trip(tmp_path):
    rng = np.random.default_rng(84)
    path = tmp_path / "payload.txt"
    for k in (256, 5):
        bits = rng.integers(0, 2, k, dtype=np.uint8)
        lm.write_payload(path, bits)
        assert np.array_equal(lm.read_payload(path), bits)
        assert np.array_equal(lm.read_payload(path, expect_k=k), bits)
    with pytest.raises(FormatError, match="expected k=99"):
        lm.read_payload(path, expect_k=99)


def test_registry_round_trip(tmp_path):
    rng = np.random.default_rng(85)
    cfg = CapacityConfig(4, 16, 16, f_c=1, f_hw=4, l=1)
    registry = UserRegistry.generate(17, cfg, rng)
    path = tmp_path / "users.txt"
    lm.save_registry(path, registry)
    loaded = lm.load_registry(path, k=cfg.k)
    assert len(loaded) == 17
    for original, read in zip(registry.entries, loaded.entries):
        assert read.user_id == original.user_id
        assert np.array_equal(read.payload, original.payload)
        assert read.material == original.material


def test_registry_infers_byte_aligned_k(tmp_path):
    rng = np.random.default_rng(86)
    cfg = CapacityConfig(2, 8, 8, f_c=1, f_hw=2, l=1)
    registry = UserRegistry.generate(3, cfg, rng)
    path = tmp_path / "users.txt"
    lm.save_registry(path, registry)
    loaded = lm.load_registry(path)
    assert loaded.k == cfg.k


def test_registry_rejects_malformed(tmp_path):
    path = tmp_path / "users.txt"
    path.write_text("0 ff\n")
    with pytest.raises(FormatError, match="4 fields"):
        lm.load_registry(path)
    path.write_text("x ff " + "00" * 32 + " " + "11" * 12 + "\n")
    with pytest.raises(FormatError, match="integer"):
        lm.load_registry(path)
    path.write_text("# only a comment\n")
    with pytest.raises(FormatError, match="no records"):
        lm.load_registry(path)


def test_duplicate_user_ids_rejected_on_load(tmp_path):
    material = KeyMaterial.generate(np.random.default_rng(87))
    entry = RegistryEntry(5, np.ones(8, np.uint8), material)
    registry = UserRegistry([entry])
    path = tmp_path / "users.txt"
    lm.save_registry(path, registry)
    doubled = path.read_text() + path.read_text().splitlines()[-1] + "\n"
    path.write_text(doubled)
    with pytest.raises(ValueError, match="unique"):
        lm.load_registry(path)

"""File formats: GSLT latent tensors, key records, payloads, registries.

GSLT is the binary interchange format for latent tensors: the magic bytes
``GSLT`` (0x47 0x53 0x4C 0x54), a version byte 0x01, the dimensions c, h, w
as 32-bit little-endian unsigned integers, then c*h*w IEEE-754 32-bit
little-endian floats in canonical element order (C order of (c, h, w)).

All text formats are line oriented: ``name = value`` records for keys and
payloads, one whitespace-separated record per line for registries.  Blank
lines and ``#`` comments are ignored everywhere.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .capacity import CapacityConfig
from .cipher import KEY_BYTES, NONCE_BYTES, KeyMaterial
from .errors import FormatError
from .stats import RegistryEntry, UserRegistry

GSLT_MAGIC = b"GSLT"
GSLT_VERSION = 1
_HEADER = struct.Struct("<4sBIII")


def write_gslt(path, values: np.ndarray) -> None:
    """Write a (c, h, w) float tensor; values are stored as float32."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 3:
        raise ValueError(f"latent tensor must be 3-dimensional, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise ValueError("latent tensor contains non-finite values")
    c, h, w = values.shape
    if max(c, h, w) > 0xFFFFFFFF:
        raise ValueError("dimensions do not fit in 32 bits")
    header = _HEADER.pack(GSLT_MAGIC, GSLT_VERSION, c, h, w)
    Path(path).write_bytes(header + values.astype("<f4").tobytes(order="C"))


def read_gslt(path) -> np.ndarray:
    """Read a GSLT file back as a float64 (c, h, w) array.

    float32 payloads widen losslessly, so read-then-write round-trips byte
    for byte.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, c, h, w = _HEADER.unpack_from(blob)
    if magic != GSLT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, not a GSLT file")
    if version != GSLT_VERSION:
        raise FormatError(f"{path}: unsupported GSLT version {version}")
    expected = _HEADER.size + 4 * c * h * w
    if len(blob) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for {c}x{h}x{w}, got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.astype(np.float64).reshape(c, h, w)


def _parse_kv(path) -> dict[str, str]:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{path}:{lineno}: expected name = value, got {raw!r}")
        name = name.strip()
        if name in fields:
            raise FormatError(f"{path}:{lineno}: duplicate field {name!r}")
        fields[name] = value.strip()
    return fields


def _take(fields: dict[str, str], name: str, path) -> str:
    try:
        return fields.pop(name)
    except KeyError:
        raise FormatError(f"{path}: missing field {name!r}") from None


def _hex_bytes(text: str, n: int, what: str, path) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise FormatError(f"{path}: {what} is not valid hex") from None
    if len(raw) != n:
        raise FormatError(f"{path}: {what} must be {n} bytes, got {len(raw)}")
    return raw


def write_key_record(path, material: KeyMaterial, cfg: CapacityConfig) -> None:
    """Key, nonce and capacity integers as a key=value text record."""
    text = (
        "# latentmark key/config record\n"
        f"key = {bytes(material.key).hex()}\n"
        f"nonce = {bytes(material.nonce).hex()}\n"
        f"c = {cfg.c}\n"
        f"h = {cfg.h}\n"
        f"w = {cfg.w}\n"
        f"f_c = {cfg.f_c}\n"
        f"f_hw = {cfg.f_hw}\n"
        f"l = {cfg.l}\n"
    )
    Path(path).write_text(text)


def read_key_record(path) -> tuple[KeyMaterial, CapacityConfig]:
    fields = _parse_kv(path)
    key = _hex_bytes(_take(fields, "key", path), KEY_BYTES, "key", path)
    nonce = _hex_bytes(_take(fields, "nonce", path), NONCE_BYTES, "nonce", path)
    numbers = {}
    for name in ("c", "h", "w", "f_c", "f_hw", "l"):
        value = _take(fields, name, path)
        try:
            numbers[name] = int(value)
        except ValueError:
            raise FormatError(f"{path}: field {name!r} must be an integer") from None
    if fields:
        raise FormatError(f"{path}: unknown fields {sorted(fields)}")
    return KeyMaterial(key, nonce), CapacityConfig(**numbers)


def payload_to_hex(bits: np.ndarray) -> str:
    """Pack a 0/1 bit array MSB-first into hex, zero-padded to whole bytes."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes().hex()


def payload_from_hex(text: str, k: int) -> np.ndarray:
    raw = bytes.fromhex(text)
    if len(raw) != (k + 7) // 8:
        raise ValueError(f"expected {(k + 7) // 8} payload bytes for k={k}, got {len(raw)}")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:k]


def write_payload(path, bits: np.ndarray) -> None:
    bits = np.asarray(bits, dtype=np.uint8)
    Path(path).write_text(f"k = {bits.size}\npayload = {payload_to_hex(bits)}\n")


def read_payload(path, expect_k: int | None = None) -> np.ndarray:
    fields = _parse_kv(path)
    try:
        k = int(_take(fields, "k", path))
    except ValueError:
        raise FormatError(f"{path}: field 'k' must be an integer") from None
    if expect_k is not None and k != expect_k:
        raise FormatError(f"{path}: payload has k={k}, expected k={expect_k}")
    try:
        return payload_from_hex(_take(fields, "payload", path), k)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def save_registry(path, registry: UserRegistry) -> None:
    """One record per line: user_id, payload hex, key hex, nonce hex."""
    lines = ["# latentmark user registry: user_id payload key nonce"]
    for e in registry.entries:
        lines.append(
            f"{e.user_id} {payload_to_hex(e.payload)} "
            f"{bytes(e.material.key).hex()} {bytes(e.material.nonce).hex()}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_registry(path, k: int | None = None) -> UserRegistry:
    """Load a registry; ``k`` defaults to the stored byte length times 8."""
    entries = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        ident, payload_hex, key_hex, nonce_hex = parts
        try:
            user_id = int(ident)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: user id must be an integer") from None
        bits_k = k if k is not None else 4 * len(payload_hex)
        try:
            payload = payload_from_hex(payload_hex, bits_k)
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        material = KeyMaterial(
            _hex_bytes(key_hex, KEY_BYTES, "key", path),
            _hex_bytes(nonce_hex, NONCE_BYTES, "nonce", path),
        )
        entries.append(RegistryEntry(user_id, payload, material))
    if not entries:
        raise FormatError(f"{path}: registry file contains no records")
    return UserRegistry(entries)

"""Keystream layer: payload bits are XORed with a ChaCha20 keystream.

The keystream uses the RFC 8439 construction (32-byte key, 12-byte nonce,
32-bit little-endian block counter) with the counter starting at 0.  Bytes
expand to bits most-significant-bit first.  XOR with the keystream makes
the embedded stream computationally indistinguishable from uniform bits,
which is exactly what the distribution-preserving sampler needs; it also
makes the mapping self-inverse, so encryption and decryption coincide.
"""

from __future__ import annotations

import secrets
import struct
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

KEY_BYTES = 32
NONCE_BYTES = 12


@dataclass(frozen=True)
class KeyMaterial:
    """A 32-byte cipher key plus the 12-byte nonce used for one embed.

    A (key, nonce) pair must not be reused across distinct embeds in
    production; :meth:`generate` draws both from the OS entropy pool.
    """

    key: bytes
    nonce: bytes

    def __post_init__(self):
        if not isinstance(self.key, (bytes, bytearray)) or len(self.key) != KEY_BYTES:
            raise ValueError(f"key must be {KEY_BYTES} bytes")
        if not isinstance(self.nonce, (bytes, bytearray)) or len(self.nonce) != NONCE_BYTES:
            raise ValueError(f"nonce must be {NONCE_BYTES} bytes")

    @classmethod
    def generate(cls, rng: np.random.Generator | None = None) -> "KeyMaterial":
        """Fresh material; pass a seeded Generator only for reproducible tests."""
        if rng is None:
            return cls(secrets.token_bytes(KEY_BYTES), secrets.token_bytes(NONCE_BYTES))
        return cls(rng.bytes(KEY_BYTES), rng.bytes(NONCE_BYTES))


def keystream(material: KeyMaterial, nbytes: int, counter: int = 0) -> bytes:
    """Raw keystream bytes starting at the given block counter."""
    if nbytes < 0:
        raise ValueError("nbytes must be non-negative")
    full_nonce = struct.pack("<I", counter) + bytes(material.nonce)
    encryptor = Cipher(algorithms.ChaCha20(bytes(material.key), full_nonce), mode=None).encryptor()
    return encryptor.update(b"\x00" * nbytes)


def keystream_bits(material: KeyMaterial, nbits: int) -> np.ndarray:
    """First ``nbits`` keystream bits as a uint8 0/1 array (MSB-first)."""
    nbytes = (nbits + 7) // 8
    raw = np.frombuffer(keystream(material, nbytes), dtype=np.uint8)
    return np.unpackbits(raw)[:nbits]


def randomize(bits: np.ndarray, material: KeyMaterial) -> np.ndarray:
    """XOR a 0/1 bit array with the keystream along the last axis.

    Total and self-inverse: applying it twice with the same material is the
    identity.  Leading batch dimensions are allowed; every row is XORed
    with the same keystream.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ keystream_bits(material, bits.shape[-1])


def derandomize(bits: np.ndarray, material: KeyMaterial) -> np.ndarray:
    """Inverse of :func:`randomize` (the XOR layer is an involution)."""
    return randomize(bits, material)

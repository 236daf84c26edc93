"""The watermark codec: replication, keystream mixing, latent sampling.

Embedding runs payload -> diffuse -> randomize -> sample_latent; extraction
runs the exact inverses in reverse order.  All functions are pure, operate
on uint8 0/1 bit arrays and float64 latents, and accept leading batch
dimensions (the documented shapes apply to the trailing axes).  Bit and
element ordering follow the conventions in :mod:`latentmark.capacity`.
"""

from __future__ import annotations

import numpy as np

from .capacity import CapacityConfig
from .cipher import KeyMaterial, derandomize, randomize
from .errors import ConfigError
from .sampling import recover_interval, sample_interval, uniform_draws


def _as_bits(bits, length: int, what: str) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1:] != (length,):
        raise ConfigError(f"{what} must have {length} bits, got shape {bits.shape}")
    return bits


def bits_to_integers(bits: np.ndarray, l: int) -> np.ndarray:
    """Group a bit stream into per-element integers, MSB first."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] % l:
        raise ConfigError(f"bit stream length {bits.shape[-1]} is not a multiple of l={l}")
    if l == 1:
        return bits.astype(np.int64)
    grouped = bits.reshape(bits.shape[:-1] + (-1, l)).astype(np.int64)
    weights = 1 << np.arange(l - 1, -1, -1, dtype=np.int64)
    return grouped @ weights


def integers_to_bits(values: np.ndarray, l: int) -> np.ndarray:
    """Serialize per-element integers back to an MSB-first bit stream."""
    values = np.asarray(values)
    if l == 1:
        return values.astype(np.uint8)
    shifts = np.arange(l - 1, -1, -1, dtype=np.int64)
    bits = (values[..., None].astype(np.int64) >> shifts) & 1
    return bits.reshape(values.shape[:-1] + (-1,)).astype(np.uint8)


def diffuse_payload(payload: np.ndarray, cfg: CapacityConfig) -> np.ndarray:
    """Replicate a k-bit payload into the full l*c*h*w bit stream.

    Copy placement is modulo tiling: element ``(ch, y, x)`` bit plane ``b``
    carries payload bit ``(b, ch % c/f_c, y % h/f_hw, x % w/f_hw)``.
    """
    payload = _as_bits(payload, cfg.k, "payload")
    lead = payload.shape[:-1]
    l, cr, hr, wr = cfg.payload_shape
    arr = payload.reshape(lead + (l, 1, cr, 1, hr, 1, wr))
    arr = np.broadcast_to(arr, lead + (l, cfg.f_c, cr, cfg.f_hw, hr, cfg.f_hw, wr))
    # element-major order with the bit plane last is the stream layout
    arr = np.moveaxis(arr, -7, -1)
    return np.ascontiguousarray(arr.reshape(lead + (cfg.n_bits,)))


def reduce_payload(diffused: np.ndarray, cfg: CapacityConfig) -> np.ndarray:
    """Majority-vote the R copies of every payload bit back to k bits.

    A bit resolves to 1 only when strictly more than R/2 of its copies are
    1; ties (R even) resolve to 0.
    """
    diffused = _as_bits(diffused, cfg.n_bits, "diffused stream")
    lead = diffused.shape[:-1]
    l, cr, hr, wr = cfg.payload_shape
    arr = diffused.reshape(lead + (cfg.f_c, cr, cfg.f_hw, hr, cfg.f_hw, wr, l))
    votes = arr.sum(axis=(-7, -5, -3), dtype=np.int64)
    votes = np.moveaxis(votes, -1, -4)  # (..., l, cr, hr, wr)
    bits = (2 * votes > cfg.replication).astype(np.uint8)
    return bits.reshape(lead + (cfg.k,))


def sample_latent(stream_bits: np.ndarray, cfg: CapacityConfig, u: np.ndarray) -> np.ndarray:
    """Map a randomized bit stream to a latent tensor via inverse-CDF draws.

    Needs one uniform draw per element (see :func:`uniform_draws`); the
    result is a float64 array of shape (..., c, h, w) whose components lie
    strictly inside their assigned slices.
    """
    stream_bits = _as_bits(stream_bits, cfg.n_bits, "randomized stream")
    lead = stream_bits.shape[:-1]
    u = np.asarray(u, dtype=np.float64).reshape(lead + (cfg.n_elements,))
    values = bits_to_integers(stream_bits, cfg.l)
    z = sample_interval(values, u, cfg.l)
    return z.reshape(lead + cfg.latent_shape)


def recover_integers(latent: np.ndarray, cfg: CapacityConfig) -> np.ndarray:
    """Invert :func:`sample_latent`: slice indices of every component, as bits."""
    latent = np.asarray(latent, dtype=np.float64)
    if latent.shape[-3:] != cfg.latent_shape:
        raise ConfigError(
            f"latent shape {latent.shape} does not end in {cfg.latent_shape}"
        )
    if not np.isfinite(latent).all():
        raise ValueError("latent tensor contains non-finite values")
    lead = latent.shape[:-3]
    flat = latent.reshape(lead + (cfg.n_elements,))
    return integers_to_bits(recover_interval(flat, cfg.l), cfg.l)


def random_payload(cfg: CapacityConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Fresh uniform k-bit payload (OS entropy unless a Generator is given)."""
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence())
    return rng.integers(0, 2, size=cfg.k, dtype=np.uint8)


def embed(
    payload: np.ndarray,
    material: KeyMaterial,
    cfg: CapacityConfig,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Full embedding pipeline: diffuse, randomize, sample.

    ``rng`` seeds the per-element uniform draws only; pass None for
    production (fresh OS entropy per call, so equal payloads still give
    distinct latents).
    """
    payload = _as_bits(payload, cfg.k, "payload")
    stream = randomize(diffuse_payload(payload, cfg), material)
    n = int(np.prod(payload.shape[:-1], dtype=np.int64)) * cfg.n_elements
    u = uniform_draws(n, rng).reshape(payload.shape[:-1] + (cfg.n_elements,))
    return sample_latent(stream, cfg, u)


def extract(latent: np.ndarray, material: KeyMaterial, cfg: CapacityConfig) -> np.ndarray:
    """Full extraction pipeline: recover, derandomize, vote."""
    return reduce_payload(derandomize(recover_integers(latent, cfg), material), cfg)

"""Seeded Monte Carlo harnesses shared by the CLI and the test suite.

Everything here takes an explicit numpy Generator, derives per-task
substreams with SeedSequence.spawn, and processes embeds in batches so
that sweeps over thousands of trials stay in vectorized numpy code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .capacity import CapacityConfig
from .channel import ChannelSpec, apply_channel
from .cipher import KeyMaterial, keystream_bits
from .codec import (
    bits_to_integers,
    diffuse_payload,
    recover_integers,
    reduce_payload,
    sample_latent,
)
from .sampling import normal_cdf, uniform_draws
from .stats import DetectionPolicy


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """n independent reproducible generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def keystream_matrix(materials: list[KeyMaterial], nbits: int) -> np.ndarray:
    """Stacked keystreams, one row per key, shape (len(materials), nbits)."""
    out = np.empty((len(materials), nbits), dtype=np.uint8)
    for row, material in enumerate(materials):
        out[row] = keystream_bits(material, nbits)
    return out


def embed_batch(
    payloads: np.ndarray,
    materials: list[KeyMaterial],
    cfg: CapacityConfig,
    rng: np.random.Generator | None,
) -> np.ndarray:
    """Embed B payloads under B independent keys, shape (B, c, h, w)."""
    payloads = np.asarray(payloads, dtype=np.uint8)
    b = payloads.shape[0]
    streams = diffuse_payload(payloads, cfg) ^ keystream_matrix(materials, cfg.n_bits)
    u = uniform_draws(b * cfg.n_elements, rng).reshape(b, cfg.n_elements)
    return sample_latent(streams, cfg, u)


def extract_batch(
    latents: np.ndarray, materials: list[KeyMaterial], cfg: CapacityConfig
) -> np.ndarray:
    """Extract B payloads under B keys, shape (B, k)."""
    streams = recover_integers(latents, cfg) ^ keystream_matrix(materials, cfg.n_bits)
    return reduce_payload(streams, cfg)


@dataclass(frozen=True)
class CellResult:
    """One sweep cell: a capacity config crossed with a channel."""

    cfg: CapacityConfig
    channel: ChannelSpec
    trials: int
    accs: np.ndarray
    tau: int | None = None

    @property
    def mean_bit_accuracy(self) -> float:
        return float(self.accs.mean() / self.cfg.k)

    @property
    def tpr(self) -> float | None:
        if self.tau is None:
            return None
        return float((self.accs >= self.tau).mean())


def channel_cell(
    cfg: CapacityConfig,
    channel: ChannelSpec,
    trials: int,
    rng: np.random.Generator,
    policy: DetectionPolicy | None = None,
    batch_size: int = 256,
) -> CellResult:
    """Embed/attack/extract `trials` times with fresh payloads and keys.

    Returns the per-trial matching-bit counts against the embedded
    payloads; channel randomness and key material both come from ``rng``.
    """
    accs = np.empty(trials, dtype=np.int64)
    done = 0
    while done < trials:
        b = min(batch_size, trials - done)
        payloads = rng.integers(0, 2, size=(b, cfg.k), dtype=np.uint8)
        materials = [KeyMaterial.generate(rng) for _ in range(b)]
        latents = embed_batch(payloads, materials, cfg, rng)
        attacked = apply_channel(latents, channel, rng)
        recovered = extract_batch(attacked, materials, cfg)
        accs[done : done + b] = (recovered == payloads).sum(-1)
        done += b
    return CellResult(cfg, channel, trials, accs, None if policy is None else policy.tau)


def match_counts_random_latents(
    material: KeyMaterial,
    cfg: CapacityConfig,
    trials: int,
    rng: np.random.Generator,
    payload: np.ndarray | None = None,
    batch_size: int = 256,
) -> np.ndarray:
    """Acc of extractions from i.i.d. N(0,1) latents, the detection null.

    With ``payload=None`` every trial is scored against a fresh random
    payload, which makes the counts exactly Binomial(k, 1/2): each
    recovered bit is independent of the fresh fair reference bit.  Scoring
    against one fixed payload instead leaves a small bias: with R even,
    vote ties resolve to 0, so recovered bits lean toward 0 by half the
    tie probability and the count distribution shifts with the payload's
    zero/one imbalance.
    """
    stream = keystream_bits(material, cfg.n_bits)
    if payload is not None:
        payload = np.asarray(payload, dtype=np.uint8)
    accs = np.empty(trials, dtype=np.int64)
    done = 0
    while done < trials:
        b = min(batch_size, trials - done)
        latents = rng.standard_normal((b,) + cfg.latent_shape)
        recovered = reduce_payload(recover_integers(latents, cfg) ^ stream, cfg)
        reference = (
            rng.integers(0, 2, size=(b, cfg.k), dtype=np.uint8)
            if payload is None
            else payload
        )
        accs[done : done + b] = (recovered == reference).sum(-1)
        done += b
    return accs


def pooled_embedded_components(
    cfg: CapacityConfig,
    n_embeds: int,
    rng: np.random.Generator,
    batch_size: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Components of many fresh embeds, plus their slice residuals.

    Returns ``(values, residuals)`` where ``values`` pools every latent
    component across embeds (each with fresh payload and key) and
    ``residuals`` holds ``2**l * cdf(z) - i``.  If embedding preserves the
    latent distribution, values are N(0,1) and residuals are U(0,1).
    """
    values = np.empty(n_embeds * cfg.n_elements, dtype=np.float64)
    residuals = np.empty_like(values)
    done = 0
    while done < n_embeds:
        b = min(batch_size, n_embeds - done)
        payloads = rng.integers(0, 2, size=(b, cfg.k), dtype=np.uint8)
        materials = [KeyMaterial.generate(rng) for _ in range(b)]
        latents = embed_batch(payloads, materials, cfg, rng)
        flat = latents.reshape(-1)
        lo = done * cfg.n_elements
        values[lo : lo + flat.size] = flat
        slices = bits_to_integers(recover_integers(latents, cfg), cfg.l).reshape(-1)
        residuals[lo : lo + flat.size] = normal_cdf(flat) * (1 << cfg.l) - slices
        done += b
    return values, residuals


def ks_normal(values: np.ndarray) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic and p-value against N(0,1)."""
    result = _scipy_stats.kstest(values, "norm")
    return float(result.statistic), float(result.pvalue)


def ks_uniform(values: np.ndarray) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic and p-value against U(0,1)."""
    result = _scipy_stats.kstest(values, "uniform")
    return float(result.statistic), float(result.pvalue)


def binomial_acc_chisquare(
    accs: np.ndarray, k: int, min_expected: float = 5.0
) -> tuple[float, float]:
    """Chi-square goodness of fit of Acc samples against Binomial(k, 1/2).

    Adjacent tail bins are merged until every expected count reaches
    ``min_expected``.
    """
    accs = np.asarray(accs)
    n = accs.size
    observed = np.bincount(accs, minlength=k + 1).astype(np.float64)
    expected = n * _scipy_stats.binom.pmf(np.arange(k + 1), k, 0.5)
    # merge from both tails toward the center
    obs_bins: list[float] = []
    exp_bins: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if exp_bins:
            obs_bins[-1] += acc_o
            exp_bins[-1] += acc_e
        else:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
    result = _scipy_stats.chisquare(np.array(obs_bins), np.array(exp_bins))
    return float(result.statistic), float(result.pvalue)

"""Latent-space degradation channels for desk-scale robustness studies.

These channels model the damage a generate/attack/invert round trip
inflicts on a recovered latent, without running an image pipeline:

* ``gaussian_noise`` adds i.i.d. N(0, sigma^2) to every component;
* ``sign_flip`` negates each component independently with a fixed rate
  (for a 1-bit-per-element codec this is exactly a bit flip; for l bits it
  maps slice i to 2**l - 1 - i by symmetry);
* ``region_rerandomize`` replaces one random axis-aligned spatial block,
  all channels, with fresh N(0,1) draws;
* ``compose`` chains sub-channels left to right.

Channels are surrogates: they reproduce trends (accuracy orderings,
threshold behavior), not the magnitudes of any image-space attack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

KINDS = ("gaussian_noise", "sign_flip", "region_rerandomize", "compose")


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    sigma: float = 0.0
    flip_rate: float = 0.0
    region_fraction: float = 0.0
    children: tuple["ChannelSpec", ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == "gaussian_noise" and not (
            math.isfinite(self.sigma) and self.sigma >= 0.0
        ):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.kind == "sign_flip" and not 0.0 <= self.flip_rate <= 1.0:
            raise ValueError(f"flip_rate must lie in [0, 1], got {self.flip_rate}")
        if self.kind == "region_rerandomize" and not 0.0 <= self.region_fraction <= 1.0:
            raise ValueError(
                f"region_fraction must lie in [0, 1], got {self.region_fraction}"
            )
        if self.kind == "compose":
            if not self.children:
                raise ValueError("compose requires at least one sub-channel")
            for child in self.children:
                if not isinstance(child, ChannelSpec):
                    raise ValueError("compose children must be ChannelSpec instances")

    @classmethod
    def gaussian(cls, sigma: float) -> "ChannelSpec":
        return cls("gaussian_noise", sigma=float(sigma))

    @classmethod
    def flip(cls, rate: float) -> "ChannelSpec":
        return cls("sign_flip", flip_rate=float(rate))

    @classmethod
    def region(cls, fraction: float) -> "ChannelSpec":
        return cls("region_rerandomize", region_fraction=float(fraction))

    @classmethod
    def compose(cls, *children: "ChannelSpec") -> "ChannelSpec":
        return cls("compose", children=tuple(children))

    def expression(self) -> str:
        """Compact text form, re-parseable by :func:`parse_channel`."""
        if self.kind == "gaussian_noise":
            return f"gauss:{self.sigma:g}"
        if self.kind == "sign_flip":
            return f"flip:{self.flip_rate:g}"
        if self.kind == "region_rerandomize":
            return f"region:{self.region_fraction:g}"
        return "+".join(child.expression() for child in self.children)


def parse_channel(text: str) -> ChannelSpec:
    """Parse expressions like ``"flip:0.4"`` or ``"gauss:0.5+flip:0.2"``.

    ``+`` composes left to right.  Recognized kinds: ``gauss:<sigma>``,
    ``flip:<rate>``, ``region:<fraction>``.
    """
    parts = [p.strip() for p in text.strip().split("+")]
    if not all(parts):
        raise ValueError(f"empty term in channel expression {text!r}")
    specs = []
    for part in parts:
        name, sep, value = part.partition(":")
        if not sep:
            raise ValueError(f"expected kind:value, got {part!r}")
        try:
            number = float(value)
        except ValueError:
            raise ValueError(f"non-numeric channel parameter in {part!r}") from None
        name = name.strip().lower()
        if name == "gauss":
            specs.append(ChannelSpec.gaussian(number))
        elif name == "flip":
            specs.append(ChannelSpec.flip(number))
        elif name == "region":
            specs.append(ChannelSpec.region(number))
        else:
            raise ValueError(f"unknown channel kind {name!r}")
    return specs[0] if len(specs) == 1 else ChannelSpec.compose(*specs)


def apply_channel(
    latent: np.ndarray, spec: ChannelSpec, rng: np.random.Generator
) -> np.ndarray:
    """Degrade a latent tensor; always returns a new array.

    Accepts leading batch dimensions; block positions and noise draws are
    independent per batch item.  Identity settings (sigma=0, rate=0,
    fraction=0) return the input unchanged bit for bit and consume no
    randomness.
    """
    z = np.asarray(latent, dtype=np.float64)
    if z.ndim < 3:
        raise ValueError("latent must have at least 3 dimensions (c, h, w)")
    if spec.kind == "gaussian_noise":
        if spec.sigma == 0.0:
            return z.copy()
        return z + spec.sigma * rng.standard_normal(z.shape)
    if spec.kind == "sign_flip":
        if spec.flip_rate == 0.0:
            return z.copy()
        mask = rng.random(z.shape) < spec.flip_rate
        return np.where(mask, -z, z)
    if spec.kind == "region_rerandomize":
        return _rerandomize_region(z, spec.region_fraction, rng)
    out = z
    for child in spec.children:
        out = apply_channel(out, child, rng)
    return out


def _rerandomize_region(z: np.ndarray, fraction: float, rng: np.random.Generator):
    c, h, w = z.shape[-3:]
    bh = round(h * math.sqrt(fraction))
    bw = round(w * math.sqrt(fraction))
    if fraction == 0.0 or bh == 0 or bw == 0:
        return z.copy()
    out = z.copy()
    flat = out.reshape(-1, c, h, w)
    for item in flat:
        y0 = int(rng.integers(0, h - bh + 1))
        x0 = int(rng.integers(0, w - bw + 1))
        item[:, y0 : y0 + bh, x0 : x0 + bw] = rng.standard_normal((c, bh, bw))
    return out


def predicted_bit_accuracy_sign_flip(flip_rate: float, replication: int) -> float:
    """Exact post-voting accuracy of one payload bit under sign flips.

    With l=1 and independent per-component flips at the given rate, each of
    the R copies stays correct with probability 1 - rate, so the voted bit
    is right with probability P(Binomial(R, 1 - rate) > R/2).
    """
    if not 0.0 <= flip_rate <= 1.0:
        raise ValueError(f"flip_rate must lie in [0, 1], got {flip_rate}")
    if replication < 1:
        raise ValueError("replication must be >= 1")
    return float(_scipy_stats.binom.sf(replication // 2, replication, 1.0 - flip_rate))

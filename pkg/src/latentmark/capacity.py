"""Capacity configuration and the bit-layout conventions of the codec.

A latent tensor has shape ``(c, h, w)`` and every element carries ``l``
hidden bits, so one tensor holds ``l*c*h*w`` stream bits.  For redundancy
the payload is replicated ``f_c`` times across channels and ``f_hw`` times
across each spatial axis, i.e. ``R = f_c * f_hw**2`` copies in total, which
fixes the payload capacity at ``k = l*c*h*w / (f_c * f_hw**2)`` bits.

Layout conventions (they define key interop and the GSLT wire format, so
they must never change):

* elements are ordered channel-major then row-major, i.e. C order of a
  ``(c, h, w)`` array;
* the ``l`` bits of element ``j`` occupy stream positions
  ``j*l .. j*l + l - 1``, most significant bit first;
* the payload is a ``(l, c/f_c, h/f_hw, w/f_hw)`` bit array flattened in
  C order, and copy ``(a, p, q)`` of payload bit ``(b, ch, y, x)`` sits at
  element ``(ch + a*c/f_c, y + p*h/f_hw, x + q*w/f_hw)``, bit plane ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class CapacityConfig:
    """Latent dimensions plus diffusion factors and per-element bit rate."""

    c: int
    h: int
    w: int
    f_c: int = 1
    f_hw: int = 1
    l: int = 1

    def __post_init__(self):
        for name in ("c", "h", "w", "f_c", "f_hw", "l"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        if self.c % self.f_c:
            raise ConfigError(f"f_c={self.f_c} does not divide c={self.c}")
        if self.h % self.f_hw:
            raise ConfigError(f"f_hw={self.f_hw} does not divide h={self.h}")
        if self.w % self.f_hw:
            raise ConfigError(f"f_hw={self.f_hw} does not divide w={self.w}")
        if self.l > 16:
            raise ConfigError(f"l={self.l} is unreasonably large (max 16)")

    @property
    def latent_shape(self) -> tuple[int, int, int]:
        return (self.c, self.h, self.w)

    @property
    def n_elements(self) -> int:
        return self.c * self.h * self.w

    @property
    def n_bits(self) -> int:
        """Stream bits carried by one latent tensor."""
        return self.l * self.n_elements

    @property
    def replication(self) -> int:
        """Number of copies R of every payload bit."""
        return self.f_c * self.f_hw * self.f_hw

    @property
    def k(self) -> int:
        """Payload capacity in bits."""
        return self.n_bits // self.replication

    @property
    def payload_shape(self) -> tuple[int, int, int, int]:
        return (self.l, self.c // self.f_c, self.h // self.f_hw, self.w // self.f_hw)

    def label(self) -> str:
        """Canonical text form, also accepted by :meth:`parse`."""
        return f"{self.c}x{self.h}x{self.w},fc={self.f_c},fhw={self.f_hw},l={self.l}"

    @classmethod
    def parse(cls, text: str) -> "CapacityConfig":
        """Parse ``"4x64x64,fc=1,fhw=8,l=1"``; fc/fhw/l default to 1."""
        parts = [p.strip() for p in text.strip().split(",") if p.strip()]
        if not parts:
            raise ConfigError(f"empty capacity config: {text!r}")
        dims = parts[0].lower().split("x")
        if len(dims) != 3:
            raise ConfigError(f"expected CxHxW dimensions, got {parts[0]!r}")
        try:
            c, h, w = (int(d) for d in dims)
        except ValueError:
            raise ConfigError(f"non-integer dimension in {parts[0]!r}") from None
        kwargs = {"f_c": 1, "f_hw": 1, "l": 1}
        names = {"fc": "f_c", "f_c": "f_c", "fhw": "f_hw", "f_hw": "f_hw", "l": "l"}
        for part in parts[1:]:
            if "=" not in part:
                raise ConfigError(f"expected name=value, got {part!r}")
            name, _, value = part.partition("=")
            key = names.get(name.strip().lower())
            if key is None:
                raise ConfigError(f"unknown capacity field {name!r}")
            try:
                kwargs[key] = int(value)
            except ValueError:
                raise ConfigError(f"non-integer value in {part!r}") from None
        return cls(c, h, w, **kwargs)


def copy_positions(cfg: CapacityConfig) -> np.ndarray:
    """Stream positions of every payload-bit copy, shape ``(k, R)``.

    ``out[g, r]`` is the stream index of copy ``r`` of payload bit ``g``
    (both in C order of their respective layouts).  Used by the vectorized
    registry matcher; the plain codec never needs it.
    """
    l, cr, hr, wr = cfg.payload_shape
    bp, cp, yp, xp = (idx.ravel() for idx in np.indices((l, cr, hr, wr)))
    a, p, q = (idx.ravel() for idx in np.indices((cfg.f_c, cfg.f_hw, cfg.f_hw)))
    ch = cp[:, None] + a[None, :] * cr
    y = yp[:, None] + p[None, :] * hr
    x = xp[:, None] + q[None, :] * wr
    return ((ch * cfg.h + y) * cfg.w + x) * cfg.l + bp[:, None]

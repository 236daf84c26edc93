"""Distribution-preserving interval sampling on the standard normal.

Hiding an integer ``i`` in ``[0, 2**l)`` inside one unit-variance component
works by cutting the standard normal into ``2**l`` slices of equal
probability mass and drawing the component from slice ``i`` through the
inverse CDF:

    z = ppf((u + i) / 2**l),   u uniform on (0, 1).

Conditioned on ``i`` the draw follows the normal restricted to slice ``i``;
marginally, with ``i`` uniform (guaranteed by the keystream layer), ``z`` is
exactly N(0, 1).  Recovery computes ``floor(2**l * cdf(z))``, clamped to
``2**l - 1`` so that the measure-zero ``cdf == 1`` case cannot overflow.

``u`` draws are clamped to ``[2**-53, 1 - 2**-53]``; this keeps ``z`` finite
and costs a bias below ``2**-52`` per component, far under test resolution.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import special as _special

U_LOW = 2.0**-53
U_HIGH = 1.0 - 2.0**-53


def normal_cdf(x) -> np.ndarray:
    """Standard normal CDF (erf-based, absolute error well under 1e-15)."""
    return _special.ndtr(np.asarray(x, dtype=np.float64))


def normal_ppf(p) -> np.ndarray:
    """Standard normal quantile function; 0 and 1 map to -inf/+inf."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("quantile argument must lie in [0, 1]")
    return _special.ndtri(p)


def uniform_draws(n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """``n`` uniforms clamped to [U_LOW, U_HIGH].

    With ``rng=None`` the draws come from the OS entropy pool (production
    mode: identical payloads still embed to distinct latents).  Pass a
    seeded Generator for reproducible runs.
    """
    if rng is None:
        raw = np.frombuffer(os.urandom(8 * n), dtype="<u8")
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    else:
        u = rng.random(n)
    return np.clip(u, U_LOW, U_HIGH)


def sample_interval(i, u, l: int) -> np.ndarray:
    """Draw from slice ``i`` of the standard normal, ``z = ppf((u+i)/2**l)``.

    ``i`` and ``u`` broadcast together.  ``u`` must lie strictly inside
    (0, 1).  The result is clipped away from the upper boundary so that the
    top slice cannot round to ppf(1) = inf in floating point.
    """
    i = np.asarray(i)
    u = np.asarray(u, dtype=np.float64)
    n = 1 << l
    if np.any(i < 0) or np.any(i >= n):
        raise ValueError(f"interval index out of range [0, {n})")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    x = (u + i) * (1.0 / n)
    return _special.ndtri(np.minimum(x, U_HIGH))


def recover_interval(z, l: int) -> np.ndarray:
    """Invert :func:`sample_interval`: ``min(floor(2**l * cdf(z)), 2**l - 1)``."""
    n = 1 << l
    p = np.asarray(_special.ndtr(np.asarray(z, dtype=np.float64)))
    p *= n
    i = p.astype(np.int64)  # truncation equals floor: p is non-negative
    np.minimum(i, n - 1, out=i)
    return i


def rejection_sample_reference(
    i: int,
    l: int,
    rng: np.random.Generator,
    size: int | None = None,
    max_draws: int = 10**6,
):
    """Reference sampler for slice ``i``: rejection from plain N(0,1) draws.

    Keeps drawing standard normals until one lands in
    ``(ppf(i/2**l), ppf((i+1)/2**l)]``.  Deliberately shares no code path
    with :func:`sample_interval` so the two can be tested against each
    other.  Raises RuntimeError if ``max_draws`` candidates are exhausted.
    """
    n = 1 << l
    if not 0 <= i < n:
        raise ValueError(f"interval index out of range [0, {n})")
    lo = _special.ndtri(i / n)
    hi = _special.ndtri((i + 1) / n)
    want = 1 if size is None else int(size)
    out: list[np.ndarray] = []
    got = 0
    drawn = 0
    while got < want:
        chunk = min(max(4 * (want - got) * n, 1024), 1 << 22)
        if drawn + chunk > max_draws:
            chunk = max_draws - drawn
            if chunk <= 0:
                raise RuntimeError(
                    f"rejection sampler exceeded its budget of {max_draws} draws"
                )
        candidates = rng.standard_normal(chunk)
        drawn += chunk
        accepted = candidates[(candidates > lo) & (candidates <= hi)]
        out.append(accepted[: want - got])
        got += len(out[-1])
    result = np.concatenate(out)
    return float(result[0]) if size is None else result

"""A self-contained deterministic latent-diffusion stand-in.

Real image pipelines need gigabytes of weights and a GPU; this module
provides a small pipeline with the same interface and the same failure
modes (discretization error in inversion, prompt effects that an
empty-prompt inversion cannot remove, 8-bit image quantization) so the
adapter and its file exchange can be exercised end to end anywhere.

The latent "data" distribution is an exact Gaussian with a radial spectral
envelope, so the true noise-prediction function is known in closed form
and the probability-flow ODE can be integrated without any learned
network.  Sampling and inversion use a deterministic second-order (Heun)
stepper over a quadratically spaced timestep grid; prompts shift the data
mean through a hash-derived per-channel and coarse spatial pattern.
Images are the latent decoded through a fixed orthonormal block code into
an 8-bit RGB picture, which the encoder inverts by least squares.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import AdapterError

TRAIN_STEPS = 1000
LATENT_SHAPE = (4, 64, 64)
BLOCK = 8  # one latent cell decodes to an 8x8 RGB block
PIXEL_SCALE = 0.7
PROMPT_SCALE = 0.02
MAX_STEPS = 400


class ReferencePipeline:
    """Deterministic latent pipeline: 4x64x64 latents, 512x512 RGB images."""

    latent_shape = LATENT_SHAPE

    def __init__(self):
        c, h, w = LATENT_SHAPE
        self.image_shape = (h * BLOCK, w * BLOCK, 3)
        betas = np.linspace(1e-4, 0.02, TRAIN_STEPS)
        alpha_bar = np.cumprod(1.0 - betas)
        self._signal = np.sqrt(alpha_bar)
        self._noise = np.sqrt(1.0 - alpha_bar)
        fy = np.fft.fftfreq(h)[:, None]
        fx = np.fft.rfftfreq(w)[None, :]
        self._spectrum = 0.6 + 1.2 * np.exp(-(fy**2 + fx**2) / 0.25**2)
        rng = np.random.default_rng(0x6C61746D)
        q, _ = np.linalg.qr(rng.standard_normal((BLOCK * BLOCK * 3, c)))
        self._mix = PIXEL_SCALE * q
        self._unmix = q.T / PIXEL_SCALE

    # -- prompt conditioning -------------------------------------------------

    def _prompt_mean_hat(self, prompt: str) -> np.ndarray:
        """Data-mean shift for a prompt, in the (ortho) frequency domain."""
        c, h, w = LATENT_SHAPE
        if not prompt:
            return np.zeros((c, h, w // 2 + 1), dtype=complex)
        digest = hashlib.sha256(prompt.encode("utf-8")).digest()
        rng = np.random.default_rng(np.frombuffer(digest, dtype=np.uint64))
        flat = rng.standard_normal((c, 1, 1))
        coarse = np.kron(rng.standard_normal((c, 8, 8)), np.ones((h // 8, w // 8)))
        mean = PROMPT_SCALE * (flat + 0.5 * coarse)
        return np.fft.rfft2(mean, norm="ortho")

    # -- exact noise prediction and the deterministic stepper ----------------

    def _eps(self, z: np.ndarray, t: int, mean_hat: np.ndarray, guidance: float):
        b, s = self._signal[t], self._noise[t]
        z_hat = np.fft.rfft2(z, norm="ortho")
        centered = z_hat - b * guidance * mean_hat
        ratio = centered / (b * b * self._spectrum + s * s)
        return s * np.fft.irfft2(ratio, s=z.shape[-2:], norm="ortho")

    def _jump(self, z: np.ndarray, eps: np.ndarray, frm: int, to: int) -> np.ndarray:
        x0 = (z - self._noise[frm] * eps) / self._signal[frm]
        return self._signal[to] * x0 + self._noise[to] * eps

    def _grid(self, steps: int) -> np.ndarray:
        if not 1 <= steps <= MAX_STEPS:
            raise AdapterError(f"steps must lie in [1, {MAX_STEPS}], got {steps}")
        frac = np.linspace(0.0, 1.0, steps + 1) ** 2
        return np.unique((frac * (TRAIN_STEPS - 1)).round().astype(int))

    def _walk(self, z, grid, mean_hat, guidance: float, toward_data: bool):
        steps = range(len(grid) - 1, 0, -1) if toward_data else range(len(grid) - 1)
        for k in steps:
            frm, to = (grid[k], grid[k - 1]) if toward_data else (grid[k], grid[k + 1])
            e1 = self._eps(z, frm, mean_hat, guidance)
            probe = self._jump(z, e1, frm, to)
            e2 = self._eps(probe, to, mean_hat, guidance)
            z = self._jump(z, 0.5 * (e1 + e2), frm, to)
        return z

    # -- latent <-> image ----------------------------------------------------

    def decode(self, latent: np.ndarray) -> np.ndarray:
        blocks = np.einsum("pc,cyx->yxp", self._mix, latent)
        h, w = latent.shape[-2:]
        pixels = blocks.reshape(h, w, BLOCK, BLOCK, 3).transpose(0, 2, 1, 3, 4)
        pixels = pixels.reshape(h * BLOCK, w * BLOCK, 3) + 0.5
        return (np.clip(pixels, 0.0, 1.0) * 255.0).round().astype(np.uint8)

    def encode(self, image: np.ndarray) -> np.ndarray:
        if image.shape != self.image_shape:
            raise AdapterError(
                f"image shape {image.shape} does not match pipeline {self.image_shape}"
            )
        h, w = LATENT_SHAPE[1:]
        pixels = image.astype(np.float64) / 255.0 - 0.5
        blocks = pixels.reshape(h, BLOCK, w, BLOCK, 3).transpose(0, 2, 1, 3, 4)
        blocks = blocks.reshape(h, w, BLOCK * BLOCK * 3)
        return np.einsum("cp,yxp->cyx", self._unmix, blocks)

    # -- the public pipeline interface ---------------------------------------

    def generate(self, latent: np.ndarray, prompt: str, steps: int, guidance: float):
        """Run the noise latent through the flow and decode an image."""
        latent = np.asarray(latent, dtype=np.float64)
        if latent.shape != self.latent_shape:
            raise AdapterError(
                f"latent shape {latent.shape} does not match pipeline {self.latent_shape}"
            )
        mean_hat = self._prompt_mean_hat(prompt)
        clean = self._walk(latent, self._grid(steps), mean_hat, guidance, toward_data=True)
        return self.decode(clean)

    def invert(self, image: np.ndarray, steps: int, guidance: float = 1.0, prompt: str = ""):
        """Estimate the initial noise latent from an image."""
        clean = self.encode(np.asarray(image))
        mean_hat = self._prompt_mean_hat(prompt)
        return self._walk(clean, self._grid(steps), mean_hat, guidance, toward_data=False)

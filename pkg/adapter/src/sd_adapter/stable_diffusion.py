"""Binding to real Stable Diffusion through diffusers (optional extra).

The adapter's only contributions are latent injection, inversion
orchestration and file exchange; all solver math belongs to the pipeline
library.  Generation feeds the GSLT latent directly into the pipeline's
``latents`` argument; inversion encodes the image with the pipeline VAE
and walks the DDIM inverse scheduler under the empty prompt.

Everything imports lazily so the rest of the adapter works without torch
or diffusers installed.
"""

from __future__ import annotations

import numpy as np

from .errors import AdapterError

_INSTALL_HINT = (
    "real diffusion pipelines need the optional extras: pip install 'sd-adapter[sd]'"
)


class StableDiffusionBinding:
    """Drives a diffusers text-to-image pipeline with injected latents."""

    def __init__(self, model_id: str, device: str | None = None):
        try:
            import torch
            from diffusers import DDIMInverseScheduler, StableDiffusionPipeline
        except ImportError as exc:
            raise AdapterError(f"cannot load {model_id!r}: {_INSTALL_HINT}") from exc
        self._torch = torch
        self.device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        try:
            self.pipe = StableDiffusionPipeline.from_pretrained(model_id)
        except Exception as exc:
            raise AdapterError(f"cannot load pipeline {model_id!r}: {exc}") from exc
        self.pipe = self.pipe.to(self.device)
        self.pipe.safety_checker = None
        self._inverse_scheduler = DDIMInverseScheduler.from_config(self.pipe.scheduler.config)
        unet = self.pipe.unet.config
        size = unet.sample_size
        self.latent_shape = (unet.in_channels, size, size)
        self.image_shape = (size * 8, size * 8, 3)

    def generate(self, latent: np.ndarray, prompt: str, steps: int, guidance: float):
        torch = self._torch
        if tuple(latent.shape) != self.latent_shape:
            raise AdapterError(
                f"latent shape {latent.shape} does not match pipeline {self.latent_shape}"
            )
        # widen the float32 file contents to the pipeline's native dtype
        seed = torch.from_numpy(np.ascontiguousarray(latent)[None]).to(
            device=self.device, dtype=self.pipe.unet.dtype
        )
        result = self.pipe(
            prompt,
            latents=seed,
            num_inference_steps=steps,
            guidance_scale=guidance,
            output_type="np",
        )
        return (result.images[0] * 255.0).round().astype(np.uint8)

    def invert(self, image: np.ndarray, steps: int, guidance: float = 1.0, prompt: str = ""):
        torch = self._torch
        pipe = self.pipe
        if tuple(image.shape) != self.image_shape:
            raise AdapterError(
                f"image shape {image.shape} does not match pipeline {self.image_shape}"
            )
        with torch.no_grad():
            pixels = torch.from_numpy(image.astype(np.float32) / 255.0 * 2.0 - 1.0)
            pixels = pixels.permute(2, 0, 1)[None].to(self.device, pipe.vae.dtype)
            latents = pipe.vae.encode(pixels).latent_dist.mode()
            latents = latents * pipe.vae.config.scaling_factor
            embeds, _ = pipe.encode_prompt(
                prompt, self.device, num_images_per_prompt=1, do_classifier_free_guidance=False
            )
            self._inverse_scheduler.set_timesteps(steps, device=self.device)
            for t in self._inverse_scheduler.timesteps:
                noise = pipe.unet(latents, t, encoder_hidden_states=embeds).sample
                latents = self._inverse_scheduler.step(noise, t, latents).prev_sample
        return latents[0].float().cpu().numpy().astype(np.float64)

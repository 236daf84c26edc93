"""Orchestration: GSLT latents in, images out, and back again.

Generation replaces the pipeline's initial noise with the GSLT contents
(float32 widened to the pipeline's native dtype).  Inversion encodes the
image, walks the pipeline's inverse integrator under the empty prompt,
and writes the estimated latent as GSLT.  Images are stored losslessly
(PNG) between the two so that only pipeline error separates a round trip.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .config import PipelineConfig
from .errors import AdapterError
from .gslt import read_gslt, write_gslt
from .reference import ReferencePipeline

_REFERENCE_NAMES = {"reference", "builtin", "builtin:reference"}
_pipeline_cache: dict[str, object] = {}


def load_pipeline(model: str):
    """The bundled reference pipeline, or a diffusers binding by model id."""
    pipeline = _pipeline_cache.get(model)
    if pipeline is None:
        if model.lower() in _REFERENCE_NAMES:
            pipeline = ReferencePipeline()
        else:
            from .stable_diffusion import StableDiffusionBinding

            pipeline = StableDiffusionBinding(model)
        _pipeline_cache[model] = pipeline
    return pipeline


def generate_with_latent(latent_file, prompt: str, cfg: PipelineConfig, out_file) -> Path:
    """Generate an image whose initial noise is exactly the GSLT latent."""
    pipeline = load_pipeline(cfg.model)
    latent = read_gslt(latent_file)
    if latent.shape != tuple(pipeline.latent_shape):
        raise AdapterError(
            f"{latent_file}: latent is {latent.shape}, pipeline wants {tuple(pipeline.latent_shape)}"
        )
    image = pipeline.generate(latent, prompt, steps=cfg.steps, guidance=cfg.guidance)
    out_file = Path(out_file)
    Image.fromarray(image).save(out_file, format="PNG")
    return out_file


def invert_image(image_file, cfg: PipelineConfig, out_file) -> Path:
    """Estimate the initial latent of an image and write it as GSLT."""
    pipeline = load_pipeline(cfg.model)
    try:
        with Image.open(image_file) as img:
            image = np.asarray(img.convert("RGB"))
    except OSError as exc:
        raise AdapterError(f"{image_file}: cannot read image: {exc}") from exc
    latent = pipeline.invert(
        image, steps=cfg.inversion_steps, guidance=cfg.inversion_guidance, prompt=""
    )
    out_file = Path(out_file)
    write_gslt(out_file, latent)
    return out_file

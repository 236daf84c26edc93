"""Bridge between the latent watermark toolkit and latent-diffusion
pipelines: inject GSLT latents as initial noise, invert images back to
latents, exchange everything through files.
"""

from .adapter import generate_with_latent, invert_image, load_pipeline
from .config import PipelineConfig
from .errors import AdapterError
from .gslt import read_gslt, write_gslt
from .reference import ReferencePipeline

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "PipelineConfig",
    "ReferencePipeline",
    "generate_with_latent",
    "invert_image",
    "load_pipeline",
    "read_gslt",
    "write_gslt",
]

"""Pipeline configuration shared by the generate and invert entry points."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .errors import AdapterError


@dataclass(frozen=True)
class PipelineConfig:
    """Which pipeline to drive and with what sampling settings.

    ``model`` is either ``"reference"`` (the bundled deterministic latent
    pipeline) or a diffusers model identifier/path for real Stable
    Diffusion (requires the ``sd`` extra).  Inversion always runs with the
    empty prompt; its guidance scale defaults to 1.
    """

    model: str = "reference"
    steps: int = 50
    guidance: float = 7.5
    inversion_steps: int = 50
    inversion_guidance: float = 1.0
    prompt_source: str | None = None

    def __post_init__(self):
        if self.steps < 1 or self.inversion_steps < 1:
            raise AdapterError("step counts must be >= 1")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Load a line-oriented ``name = value`` config file."""
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, sep, value = line.partition("=")
            if not sep:
                raise AdapterError(f"{path}:{lineno}: expected name = value")
            fields[name.strip()] = value.strip()
        known = {
            "model": str,
            "steps": int,
            "guidance": float,
            "inversion_steps": int,
            "inversion_guidance": float,
            "prompt_source": str,
        }
        kwargs = {}
        for name, value in fields.items():
            if name not in known:
                raise AdapterError(f"{path}: unknown pipeline field {name!r}")
            try:
                kwargs[name] = known[name](value)
            except ValueError:
                raise AdapterError(f"{path}: bad value for {name!r}: {value!r}") from None
        return cls(**kwargs)

    def override(self, **kwargs) -> "PipelineConfig":
        """Copy with the given non-None fields replaced."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

"""Command-line entry points: gs-generate and gs-invert.

Both accept an optional ``--config`` file (line-oriented ``name = value``,
same style as the watermark tool's records) with individual flags taking
precedence.  Exit codes: 0 success, 1 adapter/pipeline error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adapter import generate_with_latent, invert_image
from .config import PipelineConfig
from .errors import AdapterError


def _base_config(args) -> PipelineConfig:
    if args.config:
        return PipelineConfig.from_file(args.config)
    return PipelineConfig()


def _resolve_prompt(args, cfg: PipelineConfig) -> str:
    if args.prompt is not None:
        return args.prompt
    if cfg.prompt_source:
        lines = [
            line.strip()
            for line in Path(cfg.prompt_source).read_text().splitlines()
            if line.strip()
        ]
        if not lines:
            raise AdapterError(f"{cfg.prompt_source}: prompt source is empty")
        if not 0 <= args.prompt_index < len(lines):
            raise AdapterError(
                f"{cfg.prompt_source}: prompt index {args.prompt_index} out of range"
            )
        return lines[args.prompt_index]
    return ""


def generate_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gs-generate",
        description="Generate an image seeded with a GSLT latent tensor.",
    )
    parser.add_argument("--latent", required=True, help="GSLT file with the initial noise")
    parser.add_argument("--out", required=True, help="PNG image to write (lossless)")
    parser.add_argument("--prompt", default=None)
    parser.add_argument("--prompt-index", type=int, default=0,
                        help="line to use from the configured prompt source")
    parser.add_argument("--config", default=None, help="pipeline config file")
    parser.add_argument("--model", default=None)
    parser.add_argument("--steps", type=int, default=None)
    parser.add_argument("--guidance", type=float, default=None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _base_config(args).override(
            model=args.model, steps=args.steps, guidance=args.guidance
        )
        prompt = _resolve_prompt(args, cfg)
        out = generate_with_latent(args.latent, prompt, cfg, args.out)
        print(f"wrote {out}", file=sys.stderr)
        return 0
    except (AdapterError, OSError) as exc:
        print(f"gs-generate: {exc}", file=sys.stderr)
        return 1


def invert_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gs-invert",
        description="Estimate the initial latent of an image and write it as GSLT.",
    )
    parser.add_argument("--image", required=True, help="image to invert")
    parser.add_argument("--out", required=True, help="GSLT file to write")
    parser.add_argument("--config", default=None, help="pipeline config file")
    parser.add_argument("--model", default=None)
    parser.add_argument("--steps", type=int, default=None, help="inversion steps")
    parser.add_argument("--guidance", type=float, default=None, help="inversion guidance scale")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _base_config(args).override(
            model=args.model, inversion_steps=args.steps, inversion_guidance=args.guidance
        )
        out = invert_image(args.image, cfg, args.out)
        print(f"wrote {out}", file=sys.stderr)
        return 0
    except (AdapterError, OSError) as exc:
        print(f"gs-invert: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(generate_main())

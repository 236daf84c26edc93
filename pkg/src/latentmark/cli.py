"""Operator command line for the latent watermark toolkit.

Subcommands: keygen, embed, extract, detect, trace, attack, distcheck,
sweep.  Reports are written to stdout (key=value lines or CSV with a
header row); diagnostics go to stderr.  Exit codes: 0 success or positive
decision, 1 negative detection/tracing decision or failed self-test,
2 usage or configuration error, 3 I/O or file format error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .capacity import CapacityConfig
from .channel import apply_channel, parse_channel
from .cipher import KeyMaterial
from .codec import embed, extract, random_payload
from .errors import ConfigError, FormatError
from . import formats
from .simulate import (
    channel_cell,
    ks_normal,
    ks_uniform,
    pooled_embedded_components,
    spawn_rngs,
)
from .stats import detect, solve_threshold, trace

DEFAULT_CFG = "4x64x64,fc=1,fhw=8,l=1"
SELF_VERIFY_ATTEMPTS = 16


def _rng(seed):
    return None if seed is None else np.random.default_rng(seed)


def _load_key(args) -> tuple[KeyMaterial, CapacityConfig]:
    material, cfg = formats.read_key_record(args.key)
    if getattr(args, "cfg", None):
        cfg = CapacityConfig.parse(args.cfg)
    return material, cfg


def _read_latent(path, cfg: CapacityConfig) -> np.ndarray:
    latent = formats.read_gslt(path)
    if latent.shape != cfg.latent_shape:
        raise ConfigError(
            f"{path}: tensor is {latent.shape}, config expects {cfg.latent_shape}"
        )
    return latent


def _cmd_keygen(args) -> int:
    cfg = CapacityConfig.parse(args.cfg)
    material = KeyMaterial.generate(_rng(args.seed))
    formats.write_key_record(args.out, material, cfg)
    print(f"wrote key record for {cfg.label()} to {args.out}", file=sys.stderr)
    return 0


def _cmd_embed(args) -> int:
    material, cfg = _load_key(args)
    rng = _rng(args.seed)
    if args.payload is not None:
        payload = formats.read_payload(args.payload, expect_k=cfg.k)
    else:
        payload = random_payload(cfg, rng)
    for _ in range(SELF_VERIFY_ATTEMPTS):
        latent = embed(payload, material, cfg, rng)
        # verify against the float32 values that will actually be written
        stored = latent.astype("<f4").astype(np.float64)
        if np.array_equal(extract(stored, material, cfg), payload):
            break
    else:
        print("embed: self-verification kept failing, nothing written", file=sys.stderr)
        return 3
    formats.write_gslt(args.out, latent)
    if args.payload_out:
        formats.write_payload(args.payload_out, payload)
    print(f"k={cfg.k}")
    print(f"payload={formats.payload_to_hex(payload)}")
    return 0


def _cmd_extract(args) -> int:
    material, cfg = _load_key(args)
    payload = extract(_read_latent(args.infile, cfg), material, cfg)
    if args.out:
        formats.write_payload(args.out, payload)
    print(f"k={cfg.k}")
    print(f"payload={formats.payload_to_hex(payload)}")
    return 0


def _cmd_detect(args) -> int:
    material, cfg = _load_key(args)
    payload = formats.read_payload(args.payload, expect_k=cfg.k)
    policy = solve_threshold(cfg.k, args.fpr, args.users)
    report = detect(_read_latent(args.infile, cfg), material, payload, cfg, policy)
    sys.stdout.write(report.to_text())
    return 0 if report.detected else 1


def _cmd_trace(args) -> int:
    cfg = CapacityConfig.parse(args.cfg)
    registry = formats.load_registry(args.registry, k=cfg.k)
    policy = solve_threshold(cfg.k, args.fpr, len(registry))
    report = trace(_read_latent(args.infile, cfg), registry, cfg, policy)
    sys.stdout.write(report.to_text())
    return 0 if report.detected else 1


def _cmd_attack(args) -> int:
    spec = parse_channel(args.channel)
    latent = formats.read_gslt(args.infile)
    formats.write_gslt(args.out, apply_channel(latent, spec, np.random.default_rng(args.seed)))
    print(f"applied {spec.expression()} to {args.infile}", file=sys.stderr)
    return 0


def _cmd_distcheck(args) -> int:
    cfg = CapacityConfig.parse(args.cfg)
    alpha = 0.01
    rngs = spawn_rngs(args.seed, args.runs)
    print("run,ks_normal_stat,ks_normal_p,ks_uniform_stat,ks_uniform_p,pass")
    normal_passes = uniform_passes = 0
    for run, rng in enumerate(rngs):
        values, residuals = pooled_embedded_components(cfg, args.embeds, rng)
        n_stat, n_p = ks_normal(values)
        u_stat, u_p = ks_uniform(residuals)
        normal_passes += n_p > alpha
        uniform_passes += u_p > alpha
        both = "pass" if (n_p > alpha and u_p > alpha) else "fail"
        print(f"{run},{n_stat:.6g},{n_p:.6g},{u_stat:.6g},{u_p:.6g},{both}")
    required = math.ceil(0.9 * args.runs)
    ok = normal_passes >= required and uniform_passes >= required
    print(
        f"# normal {normal_passes}/{args.runs} uniform {uniform_passes}/{args.runs} "
        f"required {required} alpha {alpha}: {'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


def _parse_plan(path):
    configs: list[CapacityConfig] = []
    channels = []
    trials, seed, fpr = 100, 0, 1e-6
    fields = []
    from pathlib import Path

    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{path}:{lineno}: expected name = value")
        fields.append((name.strip().lower(), value.strip(), lineno))
    for name, value, lineno in fields:
        if name == "config":
            configs.append(CapacityConfig.parse(value))
        elif name == "channel":
            channels.append(parse_channel(value))
        elif name == "trials":
            trials = int(value)
        elif name == "seed":
            seed = int(value)
        elif name == "fpr":
            fpr = float(value)
        else:
            raise FormatError(f"{path}:{lineno}: unknown plan field {name!r}")
    if not configs or not channels:
        raise FormatError(f"{path}: plan needs at least one config and one channel")
    if trials < 1:
        raise FormatError(f"{path}: trials must be >= 1")
    return configs, channels, trials, seed, fpr


def _cmd_sweep(args) -> int:
    configs, channels, trials, seed, fpr = _parse_plan(args.plan)
    cells = [(cfg, chan) for cfg in configs for chan in channels]
    rngs = spawn_rngs(seed, len(cells))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("cell,config,channel,trials,k,R,tau,bit_acc,tpr\n")
        for index, ((cfg, chan), rng) in enumerate(zip(cells, rngs)):
            policy = solve_threshold(cfg.k, fpr)
            result = channel_cell(cfg, chan, trials, rng, policy)
            out.write(
                f'{index},"{cfg.label()}",{chan.expression()},{trials},'
                f"{cfg.k},{cfg.replication},{policy.tau},"
                f"{result.mean_bit_accuracy:.6f},{result.tpr:.6f}\n"
            )
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentmark",
        description="Watermark codec and statistical verification for Gaussian latent tensors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate key material and a capacity config")
    p.add_argument("--out", required=True, help="key record to write")
    p.add_argument("--cfg", default=DEFAULT_CFG, help=f"capacity config (default {DEFAULT_CFG})")
    p.add_argument("--seed", type=int, default=None, help="deterministic key material (tests only)")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("embed", help="embed a payload into a fresh latent tensor")
    p.add_argument("--key", required=True, help="key record from keygen")
    p.add_argument("--cfg", default=None, help="override the capacity config in the key record")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--payload", help="payload file to embed")
    group.add_argument("--payload-random", action="store_true", help="embed a fresh random payload")
    p.add_argument("--payload-out", default=None, help="write the embedded payload here")
    p.add_argument("--out", required=True, help="GSLT file to write")
    p.add_argument("--seed", type=int, default=None, help="seed the uniform draws")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="extract the payload from a GSLT file")
    p.add_argument("--key", required=True)
    p.add_argument("--cfg", default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None, help="also write the payload to this file")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("detect", help="test a GSLT file against one payload")
    p.add_argument("--key", required=True)
    p.add_argument("--cfg", default=None)
    p.add_argument("--payload", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fpr", type=float, default=1e-6)
    p.add_argument("--users", type=int, default=1, help="compound the FPR over this many tests")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("trace", help="trace a GSLT file against a user registry")
    p.add_argument("--registry", required=True)
    p.add_argument("--cfg", required=True, help="capacity config, e.g. " + DEFAULT_CFG)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fpr", type=float, default=1e-6)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("attack", help="run a degradation channel over a GSLT file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--channel", required=True, help='e.g. "flip:0.2" or "gauss:0.5+flip:0.2"')
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("distcheck", help="distribution-preservation self-test")
    p.add_argument("--cfg", default=DEFAULT_CFG)
    p.add_argument("--embeds", type=int, default=100, help="embeds pooled per run")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_distcheck)

    p = sub.add_parser("sweep", help="capacity/robustness sweep from a plan file")
    p.add_argument("--plan", required=True, help="plan file (config=, channel=, trials=, seed=, fpr=)")
    p.add_argument("--out", default=None, help="write the CSV report here instead of stdout")
    p.set_defaults(func=_cmd_sweep)

    return parser


def run(argv=None) -> int:
    """Entry point returning the exit status instead of raising SystemExit."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors, 0 for --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"latentmark: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"latentmark: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

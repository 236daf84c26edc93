import subprocess
import sys

import numpy as np
from PIL import Image

from sd_adapter import read_gslt, write_gslt
from sd_adapter.cli import generate_main, invert_main


def test_generate_and_invert_happy_path(tmp_path, rng):
    latent = tmp_path / "z.gslt"
    image = tmp_path / "img.png"
    back = tmp_path / "back.gslt"
    z = rng.standard_normal((4, 64, 64))
    write_gslt(latent, z)

    assert generate_main([
        "--latent", str(latent), "--prompt", "rain on a tin roof",
        "--out", str(image), "--steps", "20",
    ]) == 0
    with Image.open(image) as img:
        assert img.size == (512, 512)

    assert invert_main(["--image", str(image), "--out", str(back), "--steps", "20"]) == 0
    recovered = read_gslt(back)
    assert (np.sign(recovered) == np.sign(read_gslt(latent))).mean() > 0.9


def test_config_file_and_prompt_source(tmp_path, rng):
    prompts = tmp_path / "prompts.txt"
    prompts.write_text("first prompt\nsecond prompt\n")
    cfg = tmp_path / "pipe.cfg"
    cfg.write_text(f"model = reference\nsteps = 10\nprompt_source = {prompts}\n")
    latent = tmp_path / "z.gslt"
    write_gslt(latent, rng.standard_normal((4, 64, 64)))

    first = tmp_path / "a.png"
    second = tmp_path / "b.png"
    assert generate_main(["--latent", str(latent), "--out", str(first),
                          "--config", str(cfg)]) == 0
    assert generate_main(["--latent", str(latent), "--out", str(second),
                          "--config", str(cfg), "--prompt-index", "1"]) == 0
    assert first.read_bytes() != second.read_bytes()


def test_error_exits(tmp_path, rng):
    missing = tmp_path / "missing.gslt"
    assert generate_main(["--latent", str(missing), "--prompt", "x",
                          "--out", str(tmp_path / "img.png")]) == 1
    wrong = tmp_path / "small.gslt"
    write_gslt(wrong, rng.standard_normal((4, 8, 8)))
    assert generate_main(["--latent", str(wrong), "--prompt", "x",
                          "--out", str(tmp_path / "img.png")]) == 1
    assert invert_main(["--image", str(tmp_path / "nothing.png"),
                        "--out", str(tmp_path / "z.gslt")]) == 1
    assert generate_main(["--help"]) == 0
    assert invert_main(["--help"]) == 0


def test_console_scripts_installed():
    for script in ("gs-generate", "gs-invert"):
        proc = subprocess.run([script, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0, f"{script} not runnable: {proc.stderr}"
        assert "--out" in proc.stdout


def test_unknown_model_exits_with_diagnostic(tmp_path, rng, capsys):
    latent = tmp_path / "z.gslt"
    write_gslt(latent, rng.standard_normal((4, 64, 64)))
    code = generate_main(["--latent", str(latent), "--prompt", "x",
                          "--out", str(tmp_path / "img.png"),
                          "--model", "runway/some-model"])
    assert code == 1
    assert "sd-adapter[sd]" in capsys.readouterr().err

import pytest

from sd_adapter import AdapterError, PipelineConfig


def test_defaults_match_the_standard_sampling_setup():
    cfg = PipelineConfig()
    assert cfg.model == "reference"
    assert cfg.steps == 50
    assert cfg.guidance == 7.5
    assert cfg.inversion_steps == 50
    assert cfg.inversion_guidance == 1.0
    assert cfg.prompt_source is None


def test_from_file_and_override(tmp_path):
    path = tmp_path / "pipe.cfg"
    path.write_text(
        "# pipeline settings\n"
        "model = reference\n"
        "steps = 25\n"
        "guidance = 5.0\n"
        "inversion_steps = 50\n"
    )
    cfg = PipelineConfig.from_file(path)
    assert cfg.steps == 25 and cfg.guidance == 5.0
    bumped = cfg.override(steps=None, guidance=9.0)
    assert bumped.steps == 25 and bumped.guidance == 9.0


def test_from_file_rejects_malformed(tmp_path):
    path = tmp_path / "pipe.cfg"
    path.write_text("bogus = 1\n")
    with pytest.raises(AdapterError, match="unknown"):
        PipelineConfig.from_file(path)
    path.write_text("steps = many\n")
    with pytest.raises(AdapterError, match="bad value"):
        PipelineConfig.from_file(path)
    path.write_text("steps\n")
    with pytest.raises(AdapterError, match="name = value"):
        PipelineConfig.from_file(path)


def test_step_counts_validated():
    with pytest.raises(AdapterError):
        PipelineConfig(steps=0)
    with pytest.raises(AdapterError):
        PipelineConfig(inversion_steps=-1)


def test_unknown_model_requires_the_optional_extras():
    from sd_adapter import load_pipeline

    with pytest.raises(AdapterError, match="sd-adapter\\[sd\\]"):
        load_pipeline("some/diffusion-model")

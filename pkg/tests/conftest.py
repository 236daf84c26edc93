import numpy as np
import pytest

import latentmark as lm
from latentmark.simulate import match_counts_random_latents

DEFAULT_CFG = lm.CapacityConfig(4, 64, 64, f_c=1, f_hw=8, l=1)


@pytest.fixture(scope="session")
def default_cfg():
    return DEFAULT_CFG


@pytest.fixture(scope="session")
def null_acc_samples():
    """Acc of 100k extractions from i.i.d. N(0,1) latents, fresh payloads.

    Shared between the FPR-calibration acceptance criterion and the
    binomial goodness-of-fit check; takes about half a minute.
    """
    rng = np.random.default_rng(20240)
    material = lm.KeyMaterial.generate(rng)
    return match_counts_random_latents(material, DEFAULT_CFG, 100_000, rng, batch_size=512)

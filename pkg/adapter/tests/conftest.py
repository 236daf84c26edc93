import numpy as np
import pytest

from sd_adapter import ReferencePipeline


@pytest.fixture(scope="session")
def pipeline():
    return ReferencePipeline()


@pytest.fixture()
def rng():
    return np.random.default_rng(7)


def parse_payload_file(path) -> np.ndarray:
    """Parse the watermark tool's payload text format (k = .., payload = hex)."""
    fields = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            name, _, value = line.partition("=")
            fields[name.strip()] = value.strip()
    k = int(fields["k"])
    raw = bytes.fromhex(fields["payload"])
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:k]

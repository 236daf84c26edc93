"""Distribution-preserving multi-bit watermarks for Gaussian latent tensors.

The codec hides an encrypted, replicated payload in a standard-normal
latent tensor without changing its distribution, recovers it after channel
degradation, and calibrates detection and multi-user tracing thresholds on
the exact binomial null.  See README.md for the file formats and the CLI.
"""

from .capacity import CapacityConfig, copy_positions
from .channel import (
    ChannelSpec,
    apply_channel,
    parse_channel,
    predicted_bit_accuracy_sign_flip,
)
from .cipher import KeyMaterial, derandomize, keystream, keystream_bits, randomize
from .codec import (
    bits_to_integers,
    diffuse_payload,
    embed,
    extract,
    integers_to_bits,
    random_payload,
    recover_integers,
    reduce_payload,
    sample_latent,
)
from .errors import ConfigError, FormatError
from .formats import (
    load_registry,
    read_gslt,
    read_key_record,
    read_payload,
    save_registry,
    write_gslt,
    write_key_record,
    write_payload,
)
from .sampling import (
    U_HIGH,
    U_LOW,
    normal_cdf,
    normal_ppf,
    rejection_sample_reference,
    sample_interval,
    uniform_draws,
)
from .stats import (
    DetectionPolicy,
    InfeasibleThresholdError,
    MatchReport,
    RegistryEntry,
    TTestInput,
    UserRegistry,
    acc_count,
    compound_fpr,
    detect,
    exact_binomial_tail,
    fpr_detection,
    solve_threshold,
    t_critical_value,
    trace,
    two_sample_t,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityConfig",
    "ChannelSpec",
    "ConfigError",
    "DetectionPolicy",
    "FormatError",
    "InfeasibleThresholdError",
    "KeyMaterial",
    "MatchReport",
    "RegistryEntry",
    "TTestInput",
    "U_HIGH",
    "U_LOW",
    "UserRegistry",
    "acc_count",
    "apply_channel",
    "bits_to_integers",
    "compound_fpr",
    "copy_positions",
    "derandomize",
    "detect",
    "diffuse_payload",
    "embed",
    "exact_binomial_tail",
    "extract",
    "fpr_detection",
    "integers_to_bits",
    "keystream",
    "keystream_bits",
    "load_registry",
    "normal_cdf",
    "normal_ppf",
    "parse_channel",
    "predicted_bit_accuracy_sign_flip",
    "random_payload",
    "randomize",
    "read_gslt",
    "read_key_record",
    "read_payload",
    "recover_integers",
    "reduce_payload",
    "rejection_sample_reference",
    "sample_interval",
    "sample_latent",
    "save_registry",
    "solve_threshold",
    "t_critical_value",
    "trace",
    "two_sample_t",
    "uniform_draws",
    "write_gslt",
    "write_key_record",
    "write_payload",
]

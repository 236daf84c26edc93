class ConfigError(ValueError):
    """Invalid or inconsistent capacity configuration (divisibility, shape)."""


class FormatError(ValueError):
    """Malformed file content: bad magic, unsupported version, broken field."""

class AdapterError(RuntimeError):
    """Pipeline loading or orchestration failure (shape mismatch, missing
    optional dependency, unreadable model)."""

class ConfigError(ValueError):
    """Invalid run configuration or model parameter."""


class AllocationError(RuntimeError):
    """The orchestrator has nothing to allocate against."""

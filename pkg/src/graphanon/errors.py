class ConfigError(ValueError):
    """Bad parameter or configuration value (CLI exit code 2)."""


class InfeasibleError(ValueError):
    """The requested anonymity level cannot be met on this graph."""


class UndefinedMetricError(ValueError):
    pass


class ContractViolation(RuntimeError):
    """An internal precondition between modules was broken."""

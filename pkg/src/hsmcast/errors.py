"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A scenario, CLI, or calibration input is inconsistent or out of range."""


class TableError(ValueError):
    """A CQI table file failed to parse or violates the table identities."""


class PlanningError(RuntimeError):
    """No subgroup configuration can serve the group within the code budget."""

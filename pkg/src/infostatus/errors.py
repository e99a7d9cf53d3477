"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A record in an input file is structurally malformed."""


class InvariantError(ValueError):
    """Structurally valid data violates a domain invariant."""


class ConfigError(ValueError):
    """A configuration value is out of its legal range."""


class BudgetError(ValueError):
    """A token budget cannot be met without cutting protected tokens."""


class ShapeError(ValueError):
    """Tensor shapes are inconsistent with the model configuration."""

"""Exception hierarchy shared by all fklab modules."""


class FkLabError(Exception):
    """Base class for all errors raised by fklab."""


class ConfigurationError(FkLabError):
    """Bad or incomplete user configuration (unknown kind, missing key, bad range)."""


class ModelError(FkLabError):
    """Mathematically inadmissible model (divergent normalizer, degenerate weights, ...)."""


class ResourceError(FkLabError):
    """A requested window or table exceeds the configured memory budget."""


class TruncationError(FkLabError):
    """A truncation certificate is wider than the requested tolerance."""

    def __init__(self, message, suggested_radius=None):
        super().__init__(message)
        self.suggested_radius = suggested_radius


class NumericalError(FkLabError):
    """An iterative routine failed to converge or broke down."""


class PreconditionError(FkLabError):
    """An operation was called outside its stated domain."""

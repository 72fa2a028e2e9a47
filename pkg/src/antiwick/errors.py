"""Exception hierarchy shared by all modules."""


class AntiWickError(Exception):
    pass


class DomainError(AntiWickError, ValueError):
    """A symbol was evaluated on its excluded singular set."""


class NumericError(AntiWickError, ArithmeticError):
    """Non-finite accumulation or eigensolver failure."""


class CoverageError(AntiWickError, ValueError):
    """A grid does not cover the support it is asked to resolve."""

    def __init__(self, message, required_half_width=None):
        super().__init__(message)
        self.required_half_width = required_half_width


class ShapeError(AntiWickError, ValueError):
    pass


class ValidationError(AntiWickError, ValueError):
    pass


class ConfigError(AntiWickError, ValueError):
    """Malformed harness configuration; carries field/line diagnostics."""

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.path = path
        self.line = line

"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of the model (negative spend, non-finite value)."""


class ContractError(ValueError):
    """Arguments are individually valid but violate a joint precondition."""


class ShapeError(ValueError):
    """Array-like arguments have mismatched lengths."""


class SizeError(ValueError):
    """The instance is too large (or of the wrong size) for the requested routine."""


class InconsistencyError(ArithmeticError):
    """A supposed optimum fails an identity that must hold at the optimum."""


class ConfigError(ValueError):
    """A run or sweep configuration is invalid.

    ``path`` names the offending field, e.g. ``"b_vectors[1][0]"``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")

"""Exception types shared across the package.

Node indices out of range raise the builtin :class:`IndexError`; everything
else gets a named class so callers (and the CLI exit-code mapping) can tell
input-validation failures apart from numeric ones.
"""


class CycleError(ValueError):
    """Edge set contains a directed cycle (self-loops included)."""


class SizeMismatchError(ValueError):
    """Two objects that must share a dimension (node count, sample count) do not."""


class OverlapError(ValueError):
    """An adjustment set intersects the intervened/target nodes."""


class ArityError(ValueError):
    """Tuples passed to a product kernel disagree with the declared column list."""


class DomainError(ValueError):
    """Non-finite input, non-positive bandwidth, or an unknown enum value."""


class DegenerateColumnError(ValueError):
    """A data column cannot support the median bandwidth heuristic.

    Carries the offending column index in ``column`` when known.
    """

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class ColumnMismatchError(ValueError):
    """Regression weights were fitted on different conditioning columns."""


class EmptyInputError(ValueError):
    """A sample list that must be non-empty is empty."""


class NonGaussianError(ValueError):
    """A closed-form Gaussian oracle was asked about a non-Gaussian model."""


class FactorizationError(ArithmeticError):
    """The regularized kernel matrix is not numerically positive definite."""


class ParseError(ValueError):
    """A graph or dataset file does not follow its format.

    The message embeds ``path:line`` (and column where it applies); the raw
    fields are kept as attributes for programmatic use.
    """

    def __init__(self, message: str, path=None, line: int | None = None,
                 column: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:"
            if line is not None:
                loc += f"{line}:"
                if column is not None:
                    loc += f"{column}:"
            loc += " "
        super().__init__(loc + message)
        self.path = path
        self.line = line
        self.column = column

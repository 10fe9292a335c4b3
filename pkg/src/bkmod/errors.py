"""Exception hierarchy shared by every layer of the library."""


class BKError(Exception):
    """Base class for all library errors."""


class ParamsError(BKError):
    """Operands live over different coefficient rings, or parameters are invalid."""


class UnitError(BKError):
    """Inversion of a non-unit."""


class PrecisionError(BKError):
    """The answer cannot be decided at the working precision."""


class HeightError(BKError):
    """A Frobenius matrix fails the declared height bound."""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


class FilError(BKError):
    """An element expected to lie in Fil^1 S does not."""


class EquivarianceError(BKError):
    """A matrix does not commute with the Frobenius structures."""


class NotIsogeny(BKError):
    """A map whose determinant is not a power of p times a unit."""


class ResidualUnsolvable(BKError):
    """The residual sigma-conjugacy problem has no solution over the allowed fields."""

    def __init__(self, message, suggested_degree=None):
        super().__init__(message)
        self.suggested_degree = suggested_degree


class NonConvergence(BKError):
    """A fixed-point iteration did not stabilise within its budget."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class ReducibleRelation(BKError):
    """An Artin-Schreier relation already splits over the base field."""


class SchemaError(BKError):
    """A job descriptor failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2, resource
limits (budget, probe) exit 3.
"""


class HeisenspecError(Exception):
    """Base class for all library errors."""


class SingularBasis(HeisenspecError):
    """Lattice rows are linearly dependent (zero Gram determinant)."""


class BudgetExceeded(HeisenspecError):
    """An enumeration would produce more points/indices than the caller's cap."""


class ValidationError(HeisenspecError):
    """A parameter or input file violates a documented precondition."""


class InvalidR(ValidationError):
    """Schatten exponent r < 1."""


class InvalidUse(ValidationError):
    """Operation called outside its stated regime (e.g. witness with r > d+1)."""


class KernelIndex(ValidationError):
    """A kernel eigenvalue was passed where a nonzero eigenvalue is required."""


class ProbeTooSmall(HeisenspecError):
    """The spectral probe excludes a closed-form candidate index."""


class InvalidGrid(ValidationError):
    """Monotonicity grid violates x > 0, y >= 0 or |alpha| < d."""


class FunctionFormatError(ValidationError):
    """A spectral-function file is malformed; message names the term ordinal."""

"""Exception hierarchy for structural and numerical failures."""


class PseudohermError(Exception):
    """Base class for all library-specific failures."""


class NumericalFailure(PseudohermError):
    """An iterative routine failed to converge or a numerical guard broke."""


class NonDiagonalizable(PseudohermError):
    """The matrix has no complete eigenvector basis at the working tolerance."""


class InvalidEta(PseudohermError):
    """A candidate metric operator is not Hermitian or not invertible."""


class NotPseudoHermitian(PseudohermError):
    """The spectrum is not real-or-conjugate-paired, so no metric exists."""


class RealSpectrumRequired(PseudohermError):
    """The operation is defined only for matrices with a real spectrum."""


class NotIsospectral(PseudohermError):
    """Two systems disagree on a nonzero eigenvalue or its multiplicity."""


class DegenerateTwoLevel(PseudohermError):
    """Traceless two-level matrix with vanishing eigenvalues (zero or defective)."""


class NonRealDeterminant(PseudohermError):
    """Two-level factorization needs a real determinant (E real or imaginary)."""


class UsageError(PseudohermError):
    """Malformed command-line input or input file."""

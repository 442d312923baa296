"""Exception types shared across the library."""


class BlocklinError(Exception):
    """Base class for all errors raised by this package."""


class ZeroDenominator(BlocklinError):
    """A fraction or rational function was built with a zero denominator."""


class DepthMismatch(BlocklinError):
    """Two block matrices of different recursive depth were combined."""


class NonPowerOfTwo(BlocklinError):
    """A dense matrix of non power-of-two dimension where one is required."""


class MatrixFormatError(BlocklinError):
    """A matrix file or scalar token failed to parse."""


class PivotBlockSingular(BlocklinError):
    """The leading block or its Schur complement failed to invert.

    ``path`` locates the recursion node: a tuple of 'A' / 'S' steps from the
    root ('A' descends into the leading block, 'S' into the complement).
    """

    def __init__(self, path=()):
        self.path = tuple(path)
        super().__init__(f"pivot block singular at node {'/'.join(self.path) or '<root>'}")


class GramSingular(BlocklinError):
    """A self-adjoint matrix handed to the symmetric inverter is singular."""


class SingularMatrix(BlocklinError):
    """The input matrix has no inverse."""


class NonConstantResidue(BlocklinError):
    """An entry that must project to a base-field constant did not.

    This signals an internal fault, never a property of valid input; the
    offending entry is reported instead of being truncated.
    """

    def __init__(self, row, col):
        self.row = row
        self.col = col
        super().__init__(f"entry ({row}, {col}) is not a constant rational function")


class SingularDiagonal(BlocklinError):
    """A triangular matrix has a non-invertible diagonal entry."""

    def __init__(self, path=()):
        self.path = tuple(path)
        super().__init__(f"singular diagonal at node {'/'.join(self.path) or '<root>'}")


class AllBlocksSingular(BlocklinError):
    """All four half-size blocks are singular; block pivoting cannot help."""


class RandomnessExhausted(BlocklinError):
    """Every randomized preconditioning attempt failed."""

    def __init__(self, retries):
        self.retries = retries
        super().__init__(f"no successful preconditioning in {retries} attempts")

"""Exception hierarchy shared across the package."""


class OMVCDRError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(OMVCDRError, ValueError):
    """Operand shapes are incompatible."""


class SVDConvergenceError(OMVCDRError, ArithmeticError):
    """Jacobi SVD hit its sweep cap before the off-diagonal residual settled."""

    def __init__(self, residual, sweeps):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"SVD did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )


class DatasetError(OMVCDRError, ValueError):
    """Base class for problems with on-disk or in-memory datasets."""


class MissingFileError(DatasetError, FileNotFoundError):
    pass


class ManifestError(DatasetError):
    pass


class ColumnMismatchError(DatasetError):
    def __init__(self, view, expected, got):
        self.view = view
        self.expected = expected
        self.got = got
        super().__init__(
            f"view {view} has {got} columns, expected {expected}"
        )


class ParseError(DatasetError):
    def __init__(self, source, row, detail):
        self.source = source
        self.row = row
        super().__init__(f"{source}, row {row}: {detail}")


class LabelError(DatasetError):
    pass


class SolverError(OMVCDRError, RuntimeError):
    """The alternating optimization could not proceed."""


class KMeansError(SolverError):
    pass


class MonotonicityError(SolverError, AssertionError):
    """A sub-step increased the objective beyond the allowed slack."""

    def __init__(self, step, before, after):
        self.step = step
        self.before = before
        self.after = after
        super().__init__(
            f"objective increased in {step} step: {before!r} -> {after!r}"
        )

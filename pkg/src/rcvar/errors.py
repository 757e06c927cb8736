"""Exception hierarchy shared across the package."""


class RcvarError(Exception):
    """Base class for all errors raised by this package."""


class DatasetError(RcvarError):
    """Raised when a dataset file is missing, malformed, or violates an invariant."""

    def __init__(self, message: str, *, file: str | None = None, field: str | None = None):
        self.file = file
        self.field = field
        parts = []
        if file:
            parts.append(file)
        if field:
            parts.append(f"field '{field}'")
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DistributionError(RcvarError):
    """Invalid distribution parameters or an undefined distribution property."""


class FitError(DistributionError):
    """Distribution fitting failed: degenerate sample, short sample, or non-convergence."""


class EstimationError(RcvarError):
    """Invalid company profile or estimation input."""


class UnknownSelectionError(EstimationError):
    """A profile references a factor or parameter absent from the dataset."""

    def __init__(self, factor: str, parameter: str | None = None):
        self.factor = factor
        self.parameter = parameter
        if parameter is None:
            super().__init__(f"unknown factor '{factor}'")
        else:
            super().__init__(f"unknown parameter '{parameter}' for factor '{factor}'")

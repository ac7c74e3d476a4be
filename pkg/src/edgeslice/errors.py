"""Exception hierarchy shared by all edgeslice modules."""


class EdgeSliceError(Exception):
    """Base class for every error raised by edgeslice."""


class ModelFormatError(EdgeSliceError):
    """A model or report file could not be parsed."""


class ModelValidationError(EdgeSliceError):
    """A parsed model DAG violates a structural invariant."""

    def __init__(self, kind, element, message=None):
        self.kind = kind
        self.element = element
        super().__init__(message or f"{kind}: {element}")


class UnpartitionableError(EdgeSliceError):
    """The model has no usable chain of candidate partition points."""


class InfeasibleError(EdgeSliceError):
    """The model cannot be split/placed under the given physical constraints."""


class NoPathError(EdgeSliceError):
    """No k-path exists in the communication graph, even at the lowest threshold."""


class MatchingError(EdgeSliceError):
    """K-path matching failed for one run of transfer-size classes."""

    def __init__(self, transfer_class, run_start, run_length):
        self.transfer_class = transfer_class
        self.run_start = run_start
        self.run_length = run_length
        super().__init__(
            f"no k-path for class {transfer_class} run at index {run_start} "
            f"(length {run_length})"
        )


class InstanceTooLargeError(EdgeSliceError):
    """The exhaustive oracle refuses instances outside its size guard."""


class DomainError(EdgeSliceError, ValueError):
    """A bandwidth model argument lies outside its domain."""


class LengthMismatchError(EdgeSliceError, ValueError):
    """Scheme, placement and timing arrays disagree in length."""

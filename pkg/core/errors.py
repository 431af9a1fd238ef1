"""
Error Types

Every failure the library raises derives from QMaxFlowError, so callers
(and the CLI) can tell computation failures from programming errors.
"""

from typing import Optional


class QMaxFlowError(Exception):
    """Base class for all library errors."""

    #: Short name of the invariant or guard that failed, shown by the CLI.
    invariant = "error"


class InputError(QMaxFlowError):
    """Malformed input the user should fix (CLI exit code 2)."""


class NetworkSyntaxError(InputError):
    """A network file line could not be parsed."""

    invariant = "syntax"

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class NetworkValidationError(InputError):
    """A Network violates one of its structural invariants."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}")


class QsatSyntaxError(InputError):
    """A QSAT instance file line could not be parsed or is out of bounds."""

    invariant = "qsat-syntax"

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ParameterError(InputError):
    """Operation parameters outside their documented bounds."""

    invariant = "parameter-bounds"


class OracleSizeError(QMaxFlowError):
    """Too many vertices for exhaustive cut enumeration."""

    invariant = "oracle-size"


class PowerOfBaseError(QMaxFlowError):
    """A capacity is not a power of the requested base."""

    invariant = "power-of-d"

    def __init__(self, edge_id: int, capacity: int, base: int):
        self.edge_id = edge_id
        self.capacity = capacity
        self.base = base
        super().__init__(f"edge {edge_id} has capacity {capacity}, not a power of {base}")


class PrecisionEscalationError(QMaxFlowError):
    """The log-weight min cut could not be confirmed at any tried precision."""

    invariant = "min-cut-precision"


class ShapeMismatchError(QMaxFlowError):
    """A tensor does not match the valence type of its vertex."""

    invariant = "tensor-shape"


class DomainMismatchError(QMaxFlowError):
    """Tensors of one contraction live over different scalar domains."""

    invariant = "scalar-domain"


class ResourceLimitError(QMaxFlowError):
    """A configured size guard was exceeded."""

    invariant = "max-dim"


class SVDConvergenceError(QMaxFlowError):
    """The singular value decomposition did not converge."""

    invariant = "svd-convergence"


class DegenerateTensorError(QMaxFlowError):
    """A 2x2x2 tensor fails one of the three GHZ-form conditions."""

    invariant = "ghz-degenerate"

    MESSAGES = {
        1: "first slice is singular",
        2: "slice quotient has a repeated eigenvalue",
        3: "slice quotient has a vanishing off-diagonal entry",
    }

    def __init__(self, condition: int, value: Optional[float] = None):
        self.condition = condition
        self.value = value
        super().__init__(f"condition {condition}: {self.MESSAGES.get(condition, 'unknown')}")


class ZeroNetworkError(QMaxFlowError):
    """The contracted network is the zero map, so its entropy is undefined."""

    invariant = "zero-network"


class InconsistentKernelError(QMaxFlowError):
    """Independent seeds keep producing different generic kernel dimensions."""

    invariant = "seed-agreement"


class InvariantViolation(QMaxFlowError):
    """A proven inequality failed at run time, which indicates a bug."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}")

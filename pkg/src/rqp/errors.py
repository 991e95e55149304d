"""Exception hierarchy shared by every rqp module."""

from __future__ import annotations


class RqpError(Exception):
    """Base class for all input/validation failures raised by rqp."""


class CircuitSyntaxError(RqpError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GateSetError(RqpError):
    """A gate is not part of the circuit's declared gate set."""


class CircuitError(RqpError):
    """Structural problem with a gate or circuit (indices, arity, width)."""


class DistributionError(RqpError):
    """A reported probability distribution is malformed."""


class BudgetExceeded(RqpError):
    """An exact enumeration would exceed its frontier or size budget."""


class SamplingFailure(RqpError):
    """A sampling estimator produced no usable data."""

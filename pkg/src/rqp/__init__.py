"""Simulation and exact verification of scoring-rule reward protocols for
delegated quantum computation."""

from .circuit import Circuit, Gate, build_w_circuit, hadamard_count, parse_circuit
from .roottwo import RootTwoValue
from .scoring import OutcomeDistribution, brier_score, parse_distribution, reward_for_outcome

__all__ = [
    "Circuit",
    "Gate",
    "OutcomeDistribution",
    "RootTwoValue",
    "brier_score",
    "build_w_circuit",
    "hadamard_count",
    "parse_circuit",
    "parse_distribution",
    "reward_for_outcome",
]

__version__ = "0.1.0"

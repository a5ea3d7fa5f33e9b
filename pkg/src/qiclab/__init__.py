"""Simulation and measurement of information costs for two-party protocols.

Submodules: ``kernel`` (states, distances, entropies), ``classical`` and
``quantum`` (protocol models and costs), ``functions`` (Sink, Eq and
friends), ``embeddings`` (protocol reductions), ``checks`` (seeded
inequality registry), ``replays`` (lower-bound chains), ``io`` and ``cli``.
"""

from __future__ import annotations

from .checks import CheckReport, ExperimentConfig, check_ids, run_check
from .classical import ClassicalProtocol, classical_ic, worst_case_error
from .functions import eq, sink_xor
from .kernel import DEFAULT_TOL, DensityMatrix, PureState, RegisterLayout, Tolerances
from .quantum import QuantumProtocol, hqic, qic, run_rounds, sqic
from .replays import derive_eq_hqic_floor, derive_eq_ic_floor, main_theorem_demo

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ClassicalProtocol",
    "DEFAULT_TOL",
    "DensityMatrix",
    "ExperimentConfig",
    "PureState",
    "QuantumProtocol",
    "RegisterLayout",
    "Tolerances",
    "check_ids",
    "classical_ic",
    "derive_eq_hqic_floor",
    "derive_eq_ic_floor",
    "eq",
    "hqic",
    "main_theorem_demo",
    "qic",
    "run_check",
    "run_rounds",
    "sink_xor",
    "sqic",
    "worst_case_error",
]

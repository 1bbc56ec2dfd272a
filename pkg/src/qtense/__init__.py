"""Probability-valued truth for tensed propositions about a quantum subsystem."""
from .linalg import DEFAULT_TOL, evolution_operator, hermitian_eigen, is_projector
from .logic import History, NormalForm, complement_event, normalize, parse
from .model import (
    QuantumModel, event_projector, generate_commuting_model, generate_dephasing_model,
    heisenberg_projector, initial_state, load_model, rabi_model, save_model,
)
from .valuation import EvalOptions, TruthValue, tau_disjunction, tau_history, tau_prop, tau_time_sweep
from .consistency import ChReport, ch_certify, ch_residual

__all__ = [
    "DEFAULT_TOL", "evolution_operator", "hermitian_eigen", "is_projector",
    "History", "NormalForm", "complement_event", "normalize", "parse",
    "QuantumModel", "event_projector", "generate_commuting_model", "generate_dephasing_model",
    "heisenberg_projector", "initial_state", "load_model", "rabi_model", "save_model",
    "EvalOptions", "TruthValue", "tau_disjunction", "tau_history", "tau_prop", "tau_time_sweep",
    "ChReport", "ch_certify", "ch_residual",
]
__version__ = "0.1.0"

"""Quantum universe models: system (experience) factor tensored with an environment.

The experience basis is the computational basis of the system factor; an event
is a set of experience-basis indices.  Global vectors use system-major
Kronecker layout, i.e. index ``i * dim_e + k`` for system index ``i`` and
environment index ``k``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, MAX_DIM, DimensionCap

EVENT_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ModelError(ValueError):
    pass


class ParseError(ModelError):
    def __init__(self, msg: str, line: int = 0, column: int = 0):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(ModelError):
    pass


class IndexOutOfRange(ModelError):
    pass


class NegativeTime(ModelError):
    pass


Event = frozenset  # frozenset[int] of experience-basis indices


@dataclass(frozen=True, eq=False)
class QuantumModel:
    dim_s: int
    dim_e: int
    hamiltonian: np.ndarray
    events: Mapping[str, frozenset]
    initial_experience: int = 0
    initial_environment: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=np.complex128))
    # Full initial vector replacing the product |eta_0>|env>; used by the
    # commuting generator so that truth values are not all 0 or 1.
    initial_state_override: Optional[np.ndarray] = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        h = linalg.as_matrix(self.hamiltonian)
        env = np.asarray(self.initial_environment, dtype=np.complex128).ravel()
        events = {str(k): frozenset(int(i) for i in v) for k, v in self.events.items()}
        override = self.initial_state_override
        if override is not None:
            override = np.asarray(override, dtype=np.complex128).ravel()
        for arr in (h, env, override):
            if arr is not None:
                arr.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "initial_environment", env)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "initial_state_override", override)
        object.__setattr__(self, "_cache", {})
        self._validate()

    def _validate(self) -> None:
        if self.dim_s < 1 or self.dim_e < 1:
            raise ValidationError("dimensions must be positive")
        d = self.dim
        if d > MAX_DIM:
            raise DimensionCap(f"total dimension {d} exceeds cap {MAX_DIM}")
        if self.hamiltonian.shape != (d, d):
            raise ValidationError(
                f"hamiltonian dimension mismatch: expected {d}x{d}, got {self.hamiltonian.shape}"
            )
        if linalg.hermiticity_residual(self.hamiltonian) > self.tol:
            raise ValidationError("hamiltonian not Hermitian")
        for name, idx in self.events.items():
            if not EVENT_NAME.match(name):
                raise ValidationError(f"invalid event name {name!r}")
            if any(i < 0 or i >= self.dim_s for i in idx):
                raise ValidationError(f"event index out of range in event {name!r}")
        if not 0 <= self.initial_experience < self.dim_s:
            raise ValidationError("initial experience out of range")
        if self.initial_environment.shape != (self.dim_e,):
            raise ValidationError("initial environment dimension mismatch")
        if not linalg.is_normalized(self.initial_environment, self.tol):
            raise ValidationError("initial environment not normalized")
        if self.initial_state_override is not None:
            if self.initial_state_override.shape != (d,):
                raise ValidationError("initial state dimension mismatch")
            if not linalg.is_normalized(self.initial_state_override, self.tol):
                raise ValidationError("initial state not normalized")

    @property
    def dim(self) -> int:
        return self.dim_s * self.dim_e

    @property
    def product_form(self) -> bool:
        return self.initial_state_override is None

    @property
    def full_event(self) -> frozenset:
        return frozenset(range(self.dim_s))

    def event(self, name: str) -> frozenset:
        return self.events[name]

    def eigen(self) -> tuple[np.ndarray, np.ndarray]:
        if "eigen" not in self._cache:
            self._cache["eigen"] = linalg.hermitian_eigen(self.hamiltonian, self.tol)
        return self._cache["eigen"]

    def with_product_initial(self) -> "QuantumModel":
        """Same model with the initial state reset to the product form."""
        if self.product_form:
            return self
        return QuantumModel(
            self.dim_s, self.dim_e, self.hamiltonian, self.events,
            self.initial_experience, self.initial_environment, None, self.tol,
        )

    def diagonal_in_experience_basis(self, tol: float = DEFAULT_TOL) -> bool:
        """True when every event projector commutes with H (H block-diagonal in the system index)."""
        h = self.hamiltonian.reshape(self.dim_s, self.dim_e, self.dim_s, self.dim_e)
        off = h.copy()
        for i in range(self.dim_s):
            off[i, :, i, :] = 0
        return float(np.max(np.abs(off), initial=0.0)) <= tol


def check_event(model: QuantumModel, ev) -> frozenset:
    ev = frozenset(ev)
    bad = [i for i in ev if not 0 <= i < model.dim_s]
    if bad:
        raise IndexOutOfRange(f"event indices {sorted(bad)} outside 0..{model.dim_s - 1}")
    return ev


def event_projector(model: QuantumModel, ev) -> np.ndarray:
    """Pi_A tensor identity on the environment."""
    ev = check_event(model, ev)
    diag = np.zeros(model.dim_s)
    diag[list(ev)] = 1.0
    return np.diag(np.repeat(diag, model.dim_e)).astype(np.complex128)


def heisenberg_projector(model: QuantumModel, ev, t: float) -> np.ndarray:
    """exp(iHt) (Pi tensor 1) exp(-iHt); cached per model."""
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    ev = check_event(model, ev)
    key = ("proj", ev, float(t))
    cache = model._cache
    if key not in cache:
        p = event_projector(model, ev)
        # the zero and identity projectors are fixed by conjugation
        if t != 0 and 0 < len(ev) < model.dim_s:
            w, v = model.eigen()
            # V diag(e^{iwt}) V^dag P V diag(e^{-iwt}) V^dag
            ph = np.exp(1j * w * t)
            core = (v.conj().T @ p @ v) * np.outer(ph, ph.conj())
            p = v @ core @ v.conj().T
        p.flags.writeable = False
        cache[key] = p
    return cache[key]


def initial_state(model: QuantumModel) -> np.ndarray:
    if model.initial_state_override is not None:
        return model.initial_state_override
    eta = np.zeros(model.dim_s, dtype=np.complex128)
    eta[model.initial_experience] = 1.0
    return np.kron(eta, model.initial_environment)


# -- model files --------------------------------------------------------------

def _cpair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _parse_complex(x, what: str) -> complex:
    if (
        not isinstance(x, (list, tuple))
        or len(x) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in x)
    ):
        raise ValidationError(f"{what}: complex numbers must be [re, im] pairs")
    return complex(x[0], x[1])


def _parse_vector(x, what: str) -> np.ndarray:
    if not isinstance(x, list):
        raise ValidationError(f"{what} must be a list of [re, im] pairs")
    return np.array([_parse_complex(z, what) for z in x], dtype=np.complex128)


def _require_int(obj: dict, key: str) -> int:
    if key not in obj:
        raise ValidationError(f"missing field {key!r}")
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValidationError(f"field {key!r} must be an integer")
    return v


def model_from_dict(obj) -> QuantumModel:
    if not isinstance(obj, dict):
        raise ValidationError("model file must contain an object")
    dim_s = _require_int(obj, "dim_s")
    dim_e = _require_int(obj, "dim_e")
    if "hamiltonian" not in obj:
        raise ValidationError("missing field 'hamiltonian'")
    rows = obj["hamiltonian"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValidationError("hamiltonian must be a nested list of rows")
    if len({len(r) for r in rows}) > 1:
        raise ValidationError("hamiltonian rows have unequal length")
    h = np.array([[_parse_complex(z, "hamiltonian") for z in r] for r in rows], dtype=np.complex128)
    if h.size == 0:
        h = h.reshape(0, 0)
    events = obj.get("events", {})
    if not isinstance(events, dict):
        raise ValidationError("events must be an object")
    parsed_events = {}
    for name, idx in events.items():
        if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise ValidationError(f"event {name!r} must be a list of integers")
        parsed_events[name] = frozenset(idx)
    eta0 = _require_int(obj, "initial_experience")
    if "initial_environment" not in obj:
        raise ValidationError("missing field 'initial_environment'")
    env = _parse_vector(obj["initial_environment"], "initial_environment")
    override = None
    if obj.get("initial_state") is not None:
        override = _parse_vector(obj["initial_state"], "initial_state")
    return QuantumModel(dim_s, dim_e, h, parsed_events, eta0, env, override)


def load_model(text: str) -> QuantumModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    return model_from_dict(obj)


def read_model(path) -> QuantumModel:
    return load_model(Path(path).read_text(encoding="utf-8"))


def model_to_dict(model: QuantumModel) -> dict:
    obj = {
        "dim_s": model.dim_s,
        "dim_e": model.dim_e,
        "hamiltonian": [[_cpair(z) for z in row] for row in model.hamiltonian],
        "events": {k: sorted(v) for k, v in model.events.items()},
        "initial_experience": model.initial_experience,
        "initial_environment": [_cpair(z) for z in model.initial_environment],
    }
    if model.initial_state_override is not None:
        obj["initial_state"] = [_cpair(z) for z in model.initial_state_override]
    return obj


def save_model(model: QuantumModel) -> str:
    """JSON text with one matrix row or vector per line."""
    obj = model_to_dict(model)
    lines = ["{"]
    items = list(obj.items())
    for n, (k, v) in enumerate(items):
        sep = "," if n < len(items) - 1 else ""
        if k == "hamiltonian":
            rows = ",\n    ".join(json.dumps(r) for r in v)
            lines.append(f'  "{k}": [\n    {rows}\n  ]{sep}')
        elif k == "events":
            evs = ",\n    ".join(f"{json.dumps(name)}: {json.dumps(idx)}" for name, idx in v.items())
            lines.append(f'  "{k}": {{\n    {evs}\n  }}{sep}' if v else f'  "{k}": {{}}{sep}')
        else:
            lines.append(f'  "{k}": {json.dumps(v)}{sep}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def models_equal(a: QuantumModel, b: QuantumModel, tol: float = DEFAULT_TOL) -> bool:
    if (a.dim_s, a.dim_e, a.initial_experience, dict(a.events)) != (
        b.dim_s, b.dim_e, b.initial_experience, dict(b.events)
    ):
        return False
    if (a.initial_state_override is None) != (b.initial_state_override is None):
        return False
    ok = linalg.matrices_equal(a.hamiltonian, b.hamiltonian, tol) and linalg.matrices_equal(
        a.initial_environment, b.initial_environment, tol
    )
    if a.initial_state_override is not None:
        ok = ok and linalg.matrices_equal(a.initial_state_override, b.initial_state_override, tol)
    return ok


# -- generators ---------------------------------------------------------------

def rabi_model() -> QuantumModel:
    """Two-level system, H = sigma_x, trivial environment, starting in |0>."""
    return QuantumModel(2, 1, SIGMA_X, {"A": {0}, "B": {1}, "FULL": {0, 1}}, 0, [1.0])


def generate_commuting_model(dim: int, n_events: int, seed: int) -> QuantumModel:
    """Diagonal H in the experience basis with a superposed initial state.

    Every Heisenberg projector is time independent, so all history chains
    commute and CH holds exactly.  ``initial_experience`` is unused.
    """
    if dim < 2:
        raise ValidationError("dim must be at least 2")
    if dim > MAX_DIM:
        raise DimensionCap(f"dimension {dim} exceeds cap {MAX_DIM}")
    rng = np.random.default_rng(seed)
    h = np.diag(rng.uniform(-1.0, 1.0, size=dim)).astype(np.complex128)
    psi = linalg.random_state(dim, rng)
    events = {}
    for k in range(n_events):
        mask = rng.random(dim) < 0.5
        events[f"E{k}"] = frozenset(np.flatnonzero(mask).tolist())
    return QuantumModel(dim, 1, h, events, 0, [1.0], psi)


def _embed(op: np.ndarray, k: int, n: int) -> np.ndarray:
    """``op`` acting on qubit ``k`` of ``n`` qubits."""
    out = np.eye(1, dtype=np.complex128)
    for j in range(n):
        out = np.kron(out, op if j == k else np.eye(2))
    return out


def generate_dephasing_model(
    n_env_qubits: int, system_splitting: float, couplings: Sequence[float], seed: int
) -> QuantumModel:
    """Qubit under sigma_x driving with sigma_z-sigma_z couplings to environment qubits.

    H = s * sigma_x (x) 1 + sum_k c_k * sigma_z (x) sigma_z^(k).  The
    environment starts in a seeded random pure state.
    """
    if n_env_qubits < 0 or n_env_qubits > 5:
        raise DimensionCap(f"n_env_qubits must be in 0..5, got {n_env_qubits}")
    couplings = list(couplings)
    if len(couplings) != n_env_qubits:
        raise ValidationError("need one coupling per environment qubit")
    dim_e = 2 ** n_env_qubits
    h = system_splitting * np.kron(SIGMA_X, np.eye(dim_e))
    for k, c in enumerate(couplings):
        h = h + c * np.kron(SIGMA_Z, _embed(SIGMA_Z, k, n_env_qubits))
    rng = np.random.default_rng(seed)
    env = linalg.random_state(dim_e, rng) if dim_e > 1 else np.ones(1)
    return QuantumModel(2, dim_e, h, {"A": {0}, "B": {1}, "FULL": {0, 1}}, 0, env)


def generate_generic_model(dim_s: int, dim_e: int, n_events: int, seed: int) -> QuantumModel:
    """Random Hermitian H with no CH structure; product initial state."""
    if dim_s * dim_e > MAX_DIM:
        raise DimensionCap(f"dimension {dim_s * dim_e} exceeds cap {MAX_DIM}")
    rng = np.random.default_rng(seed)
    h = linalg.random_hermitian(dim_s * dim_e, rng)
    env = linalg.random_state(dim_e, rng) if dim_e > 1 else np.ones(1)
    events = {}
    for k in range(n_events):
        mask = rng.random(dim_s) < 0.5
        events[f"E{k}"] = frozenset(np.flatnonzero(mask).tolist())
    eta0 = int(rng.integers(dim_s))
    return QuantumModel(dim_s, dim_e, h, events, eta0, env)

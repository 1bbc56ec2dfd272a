"""Truth values of histories, disjunctions and general tensed propositions."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .linalg import DEFAULT_TOL
from .logic import History, NormalForm, Not, Proposition, conjoin_all, instantiate, normalize
from .model import QuantumModel, heisenberg_projector, initial_state

GENERAL = "general"
CH_FAST = "ch_fast"
MAX_IE_DISJUNCTS = 20


class ValuationError(ValueError):
    pass


class DimensionMismatch(ValuationError):
    pass


class RangeViolation(ValuationError):
    def __init__(self, raw: float, tol: float):
        self.raw = raw
        super().__init__(f"truth value {raw!r} outside [0, 1] by more than {tol:g}; CH violated?")


class NonCHWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EvalOptions:
    mode: str = GENERAL
    tolerance: float = DEFAULT_TOL
    clamp: bool = False
    # range checks belong to evaluation proper; theorem checks switch them off
    # so that violations are measured rather than raised
    check_range: bool = True

    def __post_init__(self):
        if self.mode not in (GENERAL, CH_FAST):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class TruthValue:
    value: float
    imag_residual: float = 0.0
    clamped: bool = False
    raw: Optional[float] = None

    def __float__(self) -> float:
        return self.value


def _finish(raw: float, imag: float, opts: EvalOptions) -> TruthValue:
    tol = opts.tolerance
    if opts.check_range and not (-tol <= raw <= 1 + tol):
        raise RangeViolation(raw, tol)
    value = raw
    clamped = False
    if opts.clamp and (raw < 0 or raw > 1) and -tol <= raw <= 1 + tol:
        value = min(max(raw, 0.0), 1.0)
        clamped = True
    return TruthValue(value, imag, clamped, raw)


def chain_state(model: QuantumModel, h: History) -> np.ndarray:
    """Pi~_n ... Pi~_1 |E0>, earliest projector applied first."""
    psi = initial_state(model)
    for t, ev in h.steps:
        psi = heisenberg_projector(model, ev, t) @ psi
    return psi


def _check_history(model: QuantumModel, h: History) -> None:
    for _, ev in h.steps:
        if any(i < 0 or i >= model.dim_s for i in ev):
            raise DimensionMismatch(f"history step {sorted(ev)} does not fit dim_s={model.dim_s}")


def history_amplitude(model: QuantumModel, h: History, mode: str = GENERAL) -> complex:
    """Raw history value: ||C_h^dag E0||^2 (general) or <E0|Pi~_1...Pi~_n|E0> (ch_fast)."""
    key = ("tau", mode, h.key())
    cache = model._cache
    if key in cache:
        return cache[key]
    _check_history(model, h)
    if mode == GENERAL:
        psi = chain_state(model, h)
        val = complex(np.vdot(psi, psi).real)
    else:
        e0 = initial_state(model)
        phi = e0
        for t, ev in reversed(h.steps):
            phi = heisenberg_projector(model, ev, t) @ phi
        val = complex(np.vdot(e0, phi))
    cache[key] = val
    return val


def tau_history(model: QuantumModel, h: History, opts: EvalOptions = EvalOptions()) -> TruthValue:
    z = history_amplitude(model, h, opts.mode)
    imag = abs(z.imag)
    if opts.mode == CH_FAST and imag > opts.tolerance:
        warnings.warn(f"ch_fast imaginary residual {imag:.3g} exceeds tolerance", NonCHWarning, stacklevel=2)
    return _finish(z.real, imag, opts)


def inclusion_exclusion_terms(disjuncts: Sequence[History]):
    """Yield ``(sign, conjunction)`` over non-empty subsets, ordered by size then lexicographically."""
    n = len(disjuncts)
    for r in range(1, n + 1):
        sign = 1.0 if r % 2 else -1.0
        for idx in itertools.combinations(range(n), r):
            yield sign, conjoin_all(disjuncts[i] for i in idx)


def tau_disjunction(
    model: QuantumModel, nf: NormalForm, opts: EvalOptions = EvalOptions(), canonical: bool = True
) -> TruthValue:
    """Inclusion-exclusion over all conjunctions of the disjuncts.

    With ``canonical`` the disjuncts are sorted (and deduplicated) first so
    the floating-point summation order does not depend on input order.
    """
    hs = nf.canonical().disjuncts if canonical else tuple(nf.disjuncts)
    if len(hs) > MAX_IE_DISJUNCTS:
        raise ValuationError(f"{len(hs)} disjuncts exceed the inclusion-exclusion guard of {MAX_IE_DISJUNCTS}")
    total = 0.0
    imag = 0.0
    for sign, h in inclusion_exclusion_terms(hs):
        z = history_amplitude(model, h, opts.mode)
        total += sign * z.real
        imag = max(imag, abs(z.imag))
    if opts.mode == CH_FAST and imag > opts.tolerance:
        warnings.warn(f"ch_fast imaginary residual {imag:.3g} exceeds tolerance", NonCHWarning, stacklevel=2)
    return _finish(total, imag, opts)


def tau_disjunction_recursive(model: QuantumModel, disjuncts: Sequence[History], opts: EvalOptions = EvalOptions()) -> float:
    """tau(h1 | ... | hn) = tau(h1 | ... | h_{n-1}) + tau(hn) - tau((h1 | ... | h_{n-1}) & hn).

    Evaluated in the given order, without subset enumeration.
    """
    hs = list(disjuncts)
    if not hs:
        return 0.0
    last = hs[-1]
    t_last = history_amplitude(model, last, opts.mode).real
    if len(hs) == 1:
        return t_last
    rest = hs[:-1]
    overlap = [h.conjoin(last) for h in rest]
    return (
        tau_disjunction_recursive(model, rest, opts)
        + t_last
        - tau_disjunction_recursive(model, overlap, opts)
    )


def tau_prop(
    model: QuantumModel, p: Proposition, opts: EvalOptions = EvalOptions(), negation: str = "structural"
) -> TruthValue:
    """Truth value of a proposition.

    A top-level negation is evaluated structurally (normal form of the
    complement) by default, or as ``1 - tau(child)`` with ``negation="arithmetic"``.
    """
    if negation == "arithmetic" and isinstance(p, Not):
        inner = tau_prop(model, p.child, replace(opts, clamp=False), negation)
        return _finish(1.0 - inner.raw, inner.imag_residual, opts)
    if negation not in ("structural", "arithmetic"):
        raise ValueError(f"unknown negation path {negation!r}")
    return tau_disjunction(model, normalize(p, model), opts)


def tau_time_sweep(model: QuantumModel, template: Proposition, grid: Sequence[float], opts: EvalOptions = EvalOptions()):
    grid = [float(t) for t in grid]
    if any(t <= 0 for t in grid):
        raise ValuationError("sweep times must be strictly positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValuationError("sweep grid must be strictly ascending")
    return [(t, tau_prop(model, instantiate(template, t), opts)) for t in grid]

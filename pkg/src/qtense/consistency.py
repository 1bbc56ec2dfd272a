"""Numerical check of the consistent-histories condition.

For a history of length n and binary refinements alpha, beta (event or its
complement at each step) the decoherence functional is

    D(alpha, beta) = <E0| C_alpha C_beta^dag |E0> = <v_alpha | v_beta>,
    v_alpha = Pi~_n^{a_n} ... Pi~_1^{a_1} |E0>.

CH asks for D(alpha, beta) = 0 whenever alpha != beta.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import DEFAULT_TOL
from .logic import History, NormalForm
from .model import QuantumModel, heisenberg_projector, initial_state
from .valuation import inclusion_exclusion_terms

MAX_LENGTH = 12


class LengthGuard(ValueError):
    pass


@dataclass(frozen=True)
class ChReport:
    max_residual: float = 0.0
    worst_pair: Optional[tuple] = None
    n_pairs_checked: int = 0
    skipped_trivial: int = 0
    worst_history: Optional[History] = None

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_residual <= tol


def refinement_states(model: QuantumModel, h: History) -> np.ndarray:
    """Columns v_alpha for all 2^n refinements, alpha read as a binary number with a_1 most significant."""
    vecs = initial_state(model)[:, None]
    for t, ev in h.steps:
        p = heisenberg_projector(model, ev, t)
        kept = p @ vecs
        # interleave so that the new bit becomes the least significant one
        out = np.empty((vecs.shape[0], 2 * vecs.shape[1]), dtype=np.complex128)
        out[:, 0::2] = kept
        out[:, 1::2] = vecs - kept
        vecs = out
    return vecs


def _bits(a: int, n: int) -> tuple:
    return tuple((a >> (n - 1 - k)) & 1 for k in range(n))


def decoherence_functional(model: QuantumModel, h: History, alpha, beta) -> complex:
    """D(alpha, beta) computed directly by vector chains (no Gram matrix)."""
    e0 = initial_state(model)
    va, vb = e0, e0
    for (t, ev), a, b in zip(h.steps, alpha, beta):
        p = heisenberg_projector(model, ev, t)
        va = p @ va if a == 0 else va - p @ va
        vb = p @ vb if b == 0 else vb - p @ vb
    return complex(np.vdot(va, vb))


def ch_residual(model: QuantumModel, h: History, tol: float = DEFAULT_TOL) -> ChReport:
    n = len(h)
    if n > MAX_LENGTH:
        raise LengthGuard(f"history length {n} exceeds {MAX_LENGTH}")
    key = ("ch", h.key())
    cache = model._cache
    if key in cache:
        return cache[key]
    if n == 0:
        report = ChReport()
    else:
        vecs = refinement_states(model, h)
        half = 2 ** (n - 1)
        # pairs whose last bits differ contain Pi~_n (1 - Pi~_n) = 0
        skipped = half * half
        best, worst, checked = 0.0, None, 0
        for last in (0, 1):
            idx = np.arange(last, 2 ** n, 2)
            block = vecs[:, idx]
            gram = np.abs(block.conj().T @ block)
            iu = np.triu_indices(len(idx), k=1)
            vals = gram[iu]
            checked += vals.size
            if vals.size:
                k = int(np.argmax(vals))
                if worst is None or vals[k] > best:
                    best = float(vals[k])
                    worst = (_bits(int(idx[iu[0][k]]), n), _bits(int(idx[iu[1][k]]), n))
        report = ChReport(best, worst, checked, skipped, h if worst is not None else None)
    cache[key] = report
    return report


def evaluated_histories(nf: NormalForm) -> list:
    """Distinct conjunction histories that inclusion-exclusion evaluates for ``nf``."""
    seen = {}
    for _, h in inclusion_exclusion_terms(nf.canonical().disjuncts):
        seen.setdefault(h.key(), h)
    return list(seen.values())


def ch_certify(model: QuantumModel, nf: NormalForm, tol: float = DEFAULT_TOL) -> ChReport:
    best, worst_pair, worst_h = 0.0, None, None
    checked = skipped = 0
    for h in evaluated_histories(nf):
        r = ch_residual(model, h, tol)
        checked += r.n_pairs_checked
        skipped += r.skipped_trivial
        if r.worst_pair is not None and (worst_pair is None or r.max_residual > best):
            best, worst_pair, worst_h = r.max_residual, r.worst_pair, h
    return ChReport(best, worst_pair, checked, skipped, worst_h)


def merge_reports(reports) -> ChReport:
    out = ChReport()
    for r in reports:
        better = r.worst_pair is not None and (out.worst_pair is None or r.max_residual > out.max_residual)
        out = ChReport(
            r.max_residual if better else out.max_residual,
            r.worst_pair if better else out.worst_pair,
            out.n_pairs_checked + r.n_pairs_checked,
            out.skipped_trivial + r.skipped_trivial,
            r.worst_history if better else out.worst_history,
        )
    return out

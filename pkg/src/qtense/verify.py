"""Theorem-suite runner and brute-force oracles.

Each check takes a model and a random ``Case`` and returns the violation
(0 when the property holds exactly) together with the propositions whose
normal forms were evaluated, so that the runner can certify CH on exactly
those.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .consistency import ch_certify
from .linalg import DEFAULT_TOL
from .logic import (
    And, EvAnd, EvName, EvNot, EvOr, FutureAtom, History, NormalForm, NowAtom, Not, Or,
    conj, disj, normalize, to_text,
)
from .model import (
    QuantumModel, generate_commuting_model, generate_dephasing_model, generate_generic_model,
    initial_state, rabi_model,
)
from .valuation import CH_FAST, GENERAL, EvalOptions, history_amplitude, tau_prop

FAMILIES = ("commuting", "dephasing", "rabi", "generic")
THEOREMS = (
    "T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "T9", "T10", "T11", "T12", "T13",
    "L2", "AX1", "AX2", "AX3", "AX4",
)
PRE_CH = frozenset({"T1", "T2", "T3", "T4", "AX2"})
ZERO_TOL = 1e-7
THEOREM_TOL_FACTOR = 100.0
TIME_GRID = (0.5, 1.0, 1.5, 2.0, 2.5)
BOUNDARY_RATE = 0.3
MAX_NEGATION_DISJUNCTS = 8

DEPHASING_PRESET = dict(n_env_qubits=2, system_splitting=1.0, couplings=(0.05, 0.03))

_RAW = EvalOptions(check_range=False)


class NotCommutingFamily(ValueError):
    pass


class BadTimeOrder(ValueError):
    pass


# -- oracles ------------------------------------------------------------------

def oracle_tau_bruteforce(model: QuantumModel, nf: NormalForm) -> float:
    """Truth value by summing basis-state weights, valid when H commutes with every event.

    A global basis index holds a history iff its system part lies in every
    step's event; it holds the disjunction iff it holds some history.
    """
    if not model.diagonal_in_experience_basis():
        raise NotCommutingFamily("brute-force oracle needs H block-diagonal in the experience basis")
    weights = np.abs(initial_state(model)) ** 2
    total = 0.0
    for k, w in enumerate(weights):
        i = k // model.dim_e
        if any(all(i in ev for _, ev in h.steps) for h in nf.disjuncts):
            total += w
    return float(total)


def oracle_theorem4_asymmetry(model: QuantumModel, t1: float, t2: float, ev_a, ev_b) -> tuple:
    """Theorem-4 expression with the earlier fact conditioned on, and with roles exchanged.

    ordered  = tau(h1 & h2) + tau(h1 & ~h2) - tau(h1)    (h1 = F_t1(A), h2 = F_t2(B))
    reversed = tau(h2 & h1) + tau(h2 & ~h1) - tau(h2)

    All chains are time ordered.  The first vanishes for any model; the
    second is the interference of the earlier alternative on the later fact.
    """
    if not 0 < t1 < t2:
        raise BadTimeOrder(f"need 0 < t1 < t2, got {t1}, {t2}")
    full = model.full_event
    a, b = frozenset(ev_a), frozenset(ev_b)

    def tau(*steps):
        return history_amplitude(model, History.from_steps(steps)).real

    ordered = tau((t1, a), (t2, b)) + tau((t1, a), (t2, full - b)) - tau((t1, a))
    reversed_ = tau((t1, a), (t2, b)) + tau((t1, full - a), (t2, b)) - tau((t2, b))
    return ordered, reversed_


# -- random propositions ------------------------------------------------------

@dataclass
class Case:
    h1: object
    h2: object
    k1: object
    k2: object
    h: object
    p: object
    q: object
    nows: list = field(default_factory=list)

    def text(self) -> str:
        return (
            f"h1={to_text(self.h1)}; h2={to_text(self.h2)}; k1={to_text(self.k1)}; "
            f"k2={to_text(self.k2)}; h={to_text(self.h)}; p={to_text(self.p)}; q={to_text(self.q)}"
        )


class PropositionSampler:
    """Random bounded propositions over a model's event names.

    About 30% of draws are steered toward boundary structures: full and
    empty events, repeated events, same-time atoms and complement pairs.
    """

    def __init__(self, names, rng: np.random.Generator, grid=TIME_GRID, boundary_rate=BOUNDARY_RATE):
        self.names = sorted(names)
        self.rng = rng
        self.grid = tuple(grid)
        self.boundary_rate = boundary_rate

    def boundary(self) -> bool:
        return self.rng.random() < self.boundary_rate

    def event(self):
        rng = self.rng
        e = EvName(self.names[rng.integers(len(self.names))])
        if self.boundary():
            kind = rng.integers(4)
            if kind == 0:
                return EvOr((e, EvNot(e)))
            if kind == 1:
                return EvAnd((e, EvNot(e)))
            if kind == 2:
                f = EvName(self.names[rng.integers(len(self.names))])
                return EvOr((e, f))
            return EvNot(e)
        return EvNot(e) if rng.random() < 0.3 else e

    def time(self) -> float:
        return float(self.grid[self.rng.integers(len(self.grid))])

    def one_time(self, t=None):
        return FutureAtom(self.time() if t is None else t, self.event())

    def history(self, max_len=3):
        n = int(self.rng.integers(1, max_len + 1))
        if self.boundary():
            times = [self.time() for _ in range(n)]
        else:
            times = list(self.rng.choice(self.grid, size=min(n, len(self.grid)), replace=False))
        ev = self.event()
        atoms = []
        for t in sorted(times):
            atoms.append(FutureAtom(float(t), ev if self.boundary() else self.event()))
        return conj(*atoms)

    def disjunction(self, max_disj=3, max_len=3, max_neg=MAX_NEGATION_DISJUNCTS):
        """At most ``max_disj`` histories whose lengths multiply to at most ``max_neg``.

        The product bounds the size of the structural negation.
        """
        n = int(self.rng.integers(1, max_disj + 1))
        hs, budget = [], max_neg
        for _ in range(n):
            h = self.history(min(max_len, budget))
            hs.append(h)
            budget //= len(h.children) if isinstance(h, And) else 1
            if budget < 1:
                break
        return disj(*hs)

    def case(self) -> Case:
        rng = self.rng
        h1 = self.history()
        h2 = h1 if self.boundary() else self.history()
        i, j = sorted(rng.choice(len(self.grid), size=2, replace=False))
        k1 = self.one_time(float(self.grid[i]))
        k2 = FutureAtom(float(self.grid[j]), k1.event) if self.boundary() else self.one_time(float(self.grid[j]))
        h = self.one_time()
        p = self.disjunction()
        if self.boundary():
            parts = p.children if isinstance(p, Or) else (p,)
            q = Not(parts[rng.integers(len(parts))])
        else:
            q = self.disjunction()
        nows = [NowAtom(self.event()) for _ in range(2)]
        return Case(h1, h2, k1, k2, h, p, q, nows)


# -- theorem checks -----------------------------------------------------------

def _tau(model, p) -> float:
    return tau_prop(model, p, _RAW).raw


def _range_violation(x: float) -> float:
    return max(0.0, -x, x - 1.0)


def _dev_one(x: float) -> float:
    return max(0.0, 1.0 - x)


def _dev_zero(x: float) -> float:
    return max(0.0, x)


def _is_one(x: float) -> bool:
    return x >= 1.0 - ZERO_TOL


def _is_zero(x: float) -> bool:
    return x <= ZERO_TOL


def check_T1(m, c):
    props = [c.h1, c.h2, And((c.h1, c.h2))]
    return max(_range_violation(_tau(m, x)) for x in props), props


def check_T2(m, c):
    both = And((c.h1, c.h2))
    a, b1, b2 = _tau(m, both), _tau(m, c.h1), _tau(m, c.h2)
    v = 0.0
    if _is_one(a):
        v = max(v, _dev_one(b1), _dev_one(b2))
    if _is_one(b1) and _is_one(b2):
        v = max(v, _dev_one(a))
    return v, [both, c.h1, c.h2]


def check_T3(m, c):
    both = And((c.k1, c.k2))
    v = _dev_zero(_tau(m, both)) if _is_zero(_tau(m, c.k1)) else 0.0
    return v, [c.k1, both]


def _split(m, base, cond):
    """|tau(base & cond) + tau(base & ~cond) - tau(base)| and the propositions used."""
    props = [And((base, cond)), And((base, Not(cond))), base]
    a, b, t = (_tau(m, x) for x in props)
    return abs(a + b - t), props


def check_T4(m, c):
    return _split(m, c.k1, c.k2)


def check_T5(m, c):
    both = And((c.h1, c.h2))
    v = _dev_zero(_tau(m, both)) if _is_zero(_tau(m, c.h1)) else 0.0
    return v, [c.h1, both]


def check_T6(m, c):
    return _split(m, c.h1, c.h)


def check_T7(m, c):
    both = And((c.h1, c.h2))
    return max(0.0, _tau(m, both) - _tau(m, c.h1)), [both, c.h1]


def check_T8(m, c):
    both = And((c.h1, c.h2))
    return max(0.0, _tau(m, c.h1) + _tau(m, c.h2) - 1.0 - _tau(m, both)), [both, c.h1, c.h2]


def check_T9(m, c):
    return _split(m, c.p, c.h)


def check_T10(m, c):
    return max(_range_violation(_tau(m, x)) for x in (c.p, c.q)), [c.p, c.q]


def _pq(m, c):
    pq_and, pq_or = And((c.p, c.q)), Or((c.p, c.q))
    vals = dict(p=_tau(m, c.p), q=_tau(m, c.q), a=_tau(m, pq_and), o=_tau(m, pq_or))
    return vals, [c.p, c.q, pq_and, pq_or]


def check_T11(m, c):
    v, props = _pq(m, c)
    return abs(v["o"] - v["p"] - v["q"] + v["a"]), props


def check_T12(m, c):
    v = 0.0
    props = []
    for x in (c.p, c.q, c.h1):
        neg = Not(x)
        v = max(v, abs(_tau(m, neg) - (1.0 - _tau(m, x))))
        props += [x, neg]
    return v, props


def check_T13(m, c):
    v, props = _pq(m, c)
    p, q, a, o = v["p"], v["q"], v["a"], v["o"]
    viol = 0.0
    if _is_one(a):  # (i) =>
        viol = max(viol, _dev_one(p), _dev_one(q))
    if _is_one(p) and _is_one(q):  # (i) <=
        viol = max(viol, _dev_one(a))
    if _is_zero(p) or _is_zero(q):  # (ii)
        viol = max(viol, _dev_zero(a))
    if _is_zero(o):  # (iii) =>
        viol = max(viol, _dev_zero(p), _dev_zero(q))
    if _is_zero(p) and _is_zero(q):  # (iii) <=
        viol = max(viol, _dev_zero(o))
    if _is_one(p) or _is_one(q):  # (iv)
        viol = max(viol, _dev_one(o))
    return viol, props


def check_L2(m, c):
    v = 0.0
    props = [c.h1, And((c.h1, c.h2))]
    for x in props:
        for h in normalize(x, m).disjuncts:
            v = max(v, abs(history_amplitude(m, h, GENERAL) - history_amplitude(m, h, CH_FAST)))
    return v, props


def check_AX1(m, c):
    props = [c.p, c.q, And((c.p, c.q)), Or((c.p, c.q)), Not(c.p)]
    return max(_range_violation(_tau(m, x)) for x in props), props


def check_AX2(m, c):
    pm = m.with_product_initial()
    v = 0.0
    for n in c.nows:
        t = _tau(pm, n)
        v = max(v, min(abs(t), abs(1.0 - t)))
    # evaluated on the product-form model; CH is irrelevant for N atoms
    return v, []


def check_AX3(m, c):
    v, props = _pq(m, c)
    return abs(v["a"] + v["o"] - v["p"] - v["q"]), props


def check_AX4(m, c):
    v, props = _pq(m, c)
    return max(0.0, v["a"] - v["p"], v["q"] - v["o"]), props


CHECKS: dict = {tid: globals()[f"check_{tid}"] for tid in THEOREMS}


# -- suite --------------------------------------------------------------------

@dataclass
class TheoremReport:
    theorem_id: str
    n_cases: int
    max_violation: float
    worst_case: Optional[tuple]
    passed: bool
    n_filtered: int = 0
    tolerance: float = 0.0

    @property
    def status(self) -> str:
        if self.n_cases == 0:
            return "inconclusive"
        return "pass" if self.passed else "fail"


def family_model(family: str, rng: np.random.Generator, seed: int) -> QuantumModel:
    if family == "commuting":
        return generate_commuting_model(int(rng.integers(2, 17)), 3, seed)
    if family == "dephasing":
        return generate_dephasing_model(seed=seed, **DEPHASING_PRESET)
    if family == "rabi":
        return rabi_model()
    if family == "generic":
        dim_s = int(rng.integers(2, 5))
        dim_e = int(rng.integers(1, 8 // dim_s + 1))
        return generate_generic_model(dim_s, dim_e, 3, seed)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def iter_cases(family: str, n_cases: int, seed: int):
    """Yield ``(case_seed, model, case)`` deterministically from ``seed``."""
    for i in range(n_cases):
        rng = np.random.default_rng([seed, i])
        case_seed = int(rng.integers(2**31))
        model = family_model(family, rng, case_seed)
        sampler = PropositionSampler(model.events, rng)
        yield case_seed, model, sampler.case()


def case_residual(model: QuantumModel, props, tol: float) -> float:
    r = 0.0
    for x in props:
        r = max(r, ch_certify(model, normalize(x, model), tol).max_residual)
    return r


def run_suite(
    family: str,
    n_cases: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    theorems=THEOREMS,
    ch_filter: bool = True,
) -> list:
    """Run every theorem check over ``n_cases`` seeded cases.

    CH-dependent checks only count cases whose evaluated histories certify
    to residual <= ``tol``; the rest are tallied as filtered.
    """
    if n_cases < 1:
        raise ValueError("n_cases must be at least 1")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    theorem_tol = THEOREM_TOL_FACTOR * tol
    stats = {tid: dict(n=0, filtered=0, worst=0.0, case=None) for tid in theorems}
    for case_seed, model, case in iter_cases(family, n_cases, seed):
        for tid in theorems:
            violation, props = CHECKS[tid](model, case)
            s = stats[tid]
            if ch_filter and tid not in PRE_CH and case_residual(model, props, tol) > tol:
                s["filtered"] += 1
                continue
            s["n"] += 1
            if s["case"] is None or violation > s["worst"]:
                s["worst"] = violation
                s["case"] = (case_seed, case.text())
    return [
        TheoremReport(
            tid, s["n"], s["worst"], s["case"],
            s["n"] > 0 and s["worst"] <= theorem_tol, s["filtered"], theorem_tol,
        )
        for tid, s in stats.items()
    ]


def format_report(reports) -> str:
    lines = [f"{'theorem':<8} {'status':<13} {'cases':>6} {'filtered':>8}  max_violation"]
    for r in reports:
        lines.append(f"{r.theorem_id:<8} {r.status:<13} {r.n_cases:>6} {r.n_filtered:>8}  {r.max_violation:.3e}")
    return "\n".join(lines)


def suite_exit_code(reports) -> int:
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return 5
    if "inconclusive" in statuses:
        return 4
    return 0

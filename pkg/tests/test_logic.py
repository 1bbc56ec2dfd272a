import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtense.logic import (
    And, BlowUpGuard, EvName, EvNot, EvOr, FutureAtom, History, NormalForm, Not, NowAtom, Or,
    PropSyntaxError, StrictModeError, UnknownEvent, check_strict, complement_event, instantiate,
    normalize, parse, simplify, to_text,
)
from qtense.model import QuantumModel, rabi_model
from qtense.valuation import tau_disjunction


@pytest.fixture
def m4():
    """dim_s = 4 with overlapping events."""
    return QuantumModel(
        4, 1, np.diag([0.0, 1.0, 2.0, 3.0]),
        {"A": {0, 1}, "B": {1, 2}, "C": {3}, "FULL": {0, 1, 2, 3}}, 0, [1.0],
    )


def H(*steps):
    return History.from_steps(steps)


def test_parse_atom():
    assert parse("F[1.0](A)") == FutureAtom(1.0, EvName("A"))


def test_parse_grammar():
    p = parse("F[0.5](A) & ~F[1.5](B | C)")
    assert p == And((FutureAtom(0.5, EvName("A")), Not(FutureAtom(1.5, EvOr((EvName("B"), EvName("C")))))))


def test_parse_precedence_and_whitespace():
    p = parse(" N(A)|F[2](B)&\n~F[3](C) ")
    assert isinstance(p, Or) and isinstance(p.children[1], And)
    assert parse(to_text(p)) == p


def test_parse_zero_time_rejected():
    with pytest.raises(PropSyntaxError, match="t > 0") as e:
        parse("F[0](A)")
    assert (e.value.line, e.value.column) == (1, 3)


@pytest.mark.parametrize("text,col", [
    ("F[1](A) &", 10), ("F[1](A) F[2](B)", 9), ("G[1](A)", 1), ("F[1](A", 7), ("F[x](A)", 3),
    ("F[1](A) $", 9),
])
def test_parse_errors(text, col):
    with pytest.raises(PropSyntaxError) as e:
        parse(text)
    assert e.value.column == col


def test_parse_error_expected_set():
    with pytest.raises(PropSyntaxError) as e:
        parse("F[1](A) &")
    assert set(e.value.expected) == {"'F'", "'N'", "'~'", "'('"}


def test_template_time_symbol():
    p = parse("F[t](A) & F[2](B)", template=True)
    assert instantiate(p, 0.5) == parse("F[0.5](A) & F[2](B)")
    with pytest.raises(PropSyntaxError):
        parse("F[t](A)")


def test_complement_event():
    m = rabi_model()
    assert complement_event({0}, m) == {1}
    assert complement_event({0, 1}, m) == frozenset()
    assert complement_event(set(), m) == {0, 1}


def test_same_time_conjunction_merges(m4):
    nf = normalize(parse("F[1](A) & F[1](B)"), m4)
    assert nf == NormalForm((H((1, {1})),))


def test_negated_history(m4):
    nf = normalize(parse("~(F[1](A) & F[2](B))"), m4)
    assert set(nf) == {H((1, {2, 3})), H((2, {0, 3}))}


def test_distributivity(m4):
    nf = normalize(parse("(F[1](A) | F[2](B)) & F[3](C)"), m4)
    assert set(nf) == {H((1, {0, 1}), (3, {3})), H((2, {1, 2}), (3, {3}))}


def test_now_atoms_are_time_zero(m4):
    nf = normalize(parse("N(A) & F[1](C)"), m4)
    assert nf.disjuncts == (H((0, {0, 1}), (1, {3})),)


def test_cross_time_not_absorbed(m4):
    nf = normalize(parse("F[1](A) & F[2](A)"), m4)
    assert len(nf.disjuncts[0]) == 2


def test_empty_event_history_dropped(m4):
    nf = normalize(parse("(F[1](A) & F[1](C)) | F[2](B)"), m4)
    assert nf.disjuncts == (H((2, {1, 2})),)
    # the dropped history has tau 0 so the value is unchanged
    raw = NormalForm((H((1, set())), H((2, {1, 2}))))
    assert tau_disjunction(m4, raw, canonical=False).raw == pytest.approx(tau_disjunction(m4, nf).raw, abs=1e-15)


def test_unknown_event(m4):
    with pytest.raises(UnknownEvent):
        normalize(parse("F[1](Z)"), m4)


def test_blow_up_guard(m4):
    # 2^13 disjuncts after negating a 13-way conjunction of two-step histories
    parts = " | ".join(f"(F[{i + 1}](A) & F[{i + 1.5}](B))" for i in range(13))
    with pytest.raises(BlowUpGuard):
        normalize(parse(f"~({parts})"), m4)


def test_strict_mode():
    check_strict(parse("F[1](A | ~B)"))
    check_strict(parse("~F[1](A) & F[1](B)"))
    with pytest.raises(StrictModeError, match="cross-tense connective rejected in strict mode"):
        check_strict(parse("F[1](A) & N(B)"))
    with pytest.raises(StrictModeError):
        check_strict(parse("F[1](A) | F[2](B)"))


# -- properties -------------------------------------------------------------

NAMES = ["A", "B", "C", "FULL"]
TIMES = [0.5, 1.0, 2.0]

events = st.recursive(
    st.sampled_from(NAMES).map(EvName),
    lambda ch: st.one_of(
        ch.map(EvNot),
        st.tuples(ch, ch).map(EvOr),
    ),
    max_leaves=3,
)
atoms_ = st.one_of(
    st.builds(FutureAtom, st.sampled_from(TIMES), events),
    st.builds(NowAtom, events),
)
props = st.recursive(
    atoms_,
    lambda ch: st.one_of(
        ch.map(Not),
        st.tuples(ch, ch).map(And),
        st.tuples(ch, ch).map(Or),
    ),
    max_leaves=5,
)


@settings(max_examples=150, deadline=None)
@given(props)
def test_double_negation(p):
    m = _M4
    assert normalize(Not(Not(p)), m) == normalize(p, m)


@settings(max_examples=150, deadline=None)
@given(props, props)
def test_de_morgan_same_normal_form(p, q):
    m = _M4
    assert normalize(Not(And((p, q))), m) == normalize(Or((Not(p), Not(q))), m)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(TIMES), events, events)
def test_tense_homomorphism(t, a, b):
    m = _M4
    lhs = normalize(Or((FutureAtom(t, a), FutureAtom(t, b))), m)
    assert lhs == normalize(FutureAtom(t, EvOr((a, b))), m)


@settings(max_examples=150, deadline=None)
@given(props)
def test_normalize_idempotent(p):
    m = _M4
    nf = normalize(p, m)
    assert simplify(nf) == nf


_M4 = QuantumModel(
    4, 1, np.diag([0.0, 1.0, 2.0, 3.0]),
    {"A": {0, 1}, "B": {1, 2}, "C": {3}, "FULL": {0, 1, 2, 3}}, 0, [1.0],
)

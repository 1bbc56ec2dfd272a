"""Tensed propositions: AST, DSL parser and normalization to disjunctions of histories.

Grammar (``&`` binds tighter than ``|``, ``~`` tightest)::

    prop   = term { "|" term }
    term   = factor { "&" factor }
    factor = "~" factor | atom | "(" prop ")"
    atom   = "F" "[" number "]" "(" evexpr ")" | "N" "(" evexpr ")"
    evexpr = evterm { "|" evterm }
    evterm = evfac { "&" evfac }
    evfac  = "~" evfac | IDENT | "(" evexpr ")"
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

MAX_DISJUNCTS = 4096
TIME_SYMBOL = "t"


class LogicError(ValueError):
    pass


class PropSyntaxError(LogicError):
    def __init__(self, msg: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{msg} at line {line}, column {column}{detail}")


class UnknownEvent(LogicError):
    pass


class BlowUpGuard(LogicError):
    pass


class StrictModeError(LogicError):
    pass


# -- event expressions --------------------------------------------------------

@dataclass(frozen=True)
class EvName:
    name: str


@dataclass(frozen=True)
class EvNot:
    child: "EvExpr"


@dataclass(frozen=True)
class EvAnd:
    children: tuple


@dataclass(frozen=True)
class EvOr:
    children: tuple


EvExpr = Union[EvName, EvNot, EvAnd, EvOr]


def resolve_event(ev: EvExpr, model) -> frozenset:
    full = frozenset(range(model.dim_s))
    if isinstance(ev, EvName):
        if ev.name not in model.events:
            raise UnknownEvent(f"unknown event {ev.name!r}")
        return frozenset(model.events[ev.name])
    if isinstance(ev, EvNot):
        return full - resolve_event(ev.child, model)
    if isinstance(ev, EvAnd):
        out = full
        for c in ev.children:
            out = out & resolve_event(c, model)
        return out
    if isinstance(ev, EvOr):
        out = frozenset()
        for c in ev.children:
            out = out | resolve_event(c, model)
        return out
    raise TypeError(f"not an event expression: {ev!r}")


def complement_event(ev, model) -> frozenset:
    return frozenset(range(model.dim_s)) - frozenset(ev)


# -- propositions -------------------------------------------------------------

@dataclass(frozen=True)
class FutureAtom:
    time: Union[float, str]
    event: EvExpr
    pos: tuple = field(default=(0, 0), compare=False, repr=False)

    def __post_init__(self):
        if self.time != TIME_SYMBOL and not self.time > 0:
            raise LogicError(f"F requires t > 0, got {self.time}")


@dataclass(frozen=True)
class NowAtom:
    event: EvExpr
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: "Proposition"


Proposition = Union[FutureAtom, NowAtom, And, Or, Not]


def conj(*ps) -> Proposition:
    return ps[0] if len(ps) == 1 else And(tuple(ps))


def disj(*ps) -> Proposition:
    return ps[0] if len(ps) == 1 else Or(tuple(ps))


def atoms(p: Proposition):
    if isinstance(p, (FutureAtom, NowAtom)):
        yield p
    elif isinstance(p, Not):
        yield from atoms(p.child)
    else:
        for c in p.children:
            yield from atoms(c)


def has_time_symbol(p: Proposition) -> bool:
    return any(isinstance(a, FutureAtom) and a.time == TIME_SYMBOL for a in atoms(p))


def instantiate(p: Proposition, t: float) -> Proposition:
    """Replace the free time symbol with ``t``."""
    if isinstance(p, FutureAtom):
        return FutureAtom(t, p.event, p.pos) if p.time == TIME_SYMBOL else p
    if isinstance(p, NowAtom):
        return p
    if isinstance(p, Not):
        return Not(instantiate(p.child, t))
    return type(p)(tuple(instantiate(c, t) for c in p.children))


def check_strict(p: Proposition) -> None:
    """Reject connectives joining atoms of different tenses or times."""
    tenses = {("F", a.time) if isinstance(a, FutureAtom) else ("N",) for a in atoms(p)}
    if len(tenses) > 1:
        raise StrictModeError("cross-tense connective rejected in strict mode")


# -- printing -----------------------------------------------------------------

def _fmt_time(t) -> str:
    return t if isinstance(t, str) else repr(float(t))


def event_to_text(ev: EvExpr, level: int = 0) -> str:
    if isinstance(ev, EvName):
        return ev.name
    if isinstance(ev, EvNot):
        return "~" + event_to_text(ev.child, 2)
    if isinstance(ev, EvAnd):
        s = " & ".join(event_to_text(c, 1) for c in ev.children)
        return f"({s})" if level > 1 else s
    s = " | ".join(event_to_text(c, 0) for c in ev.children)
    return f"({s})" if level > 0 else s


def to_text(p: Proposition, level: int = 0) -> str:
    if isinstance(p, FutureAtom):
        return f"F[{_fmt_time(p.time)}]({event_to_text(p.event)})"
    if isinstance(p, NowAtom):
        return f"N({event_to_text(p.event)})"
    if isinstance(p, Not):
        return "~" + to_text(p.child, 2)
    if isinstance(p, And):
        s = " & ".join(to_text(c, 1) for c in p.children)
        return f"({s})" if level > 1 else s
    s = " | ".join(to_text(c, 0) for c in p.children)
    return f"({s})" if level > 0 else s


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[()\[\]&|~])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PropSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line += 1
                    line_start = i + 1
        else:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "<end>", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, template: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.template = template

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected, tok=None):
        tok = tok or self.tok
        raise PropSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.fail([repr(text)])

    def parse(self) -> Proposition:
        p = self.prop()
        if self.tok.kind != "eof":
            self.fail(["'|'", "'&'", "<end>"])
        return p

    def prop(self):
        items = [self.term()]
        while self.accept("|"):
            items.append(self.term())
        return disj(*items)

    def term(self):
        items = [self.factor()]
        while self.accept("&"):
            items.append(self.factor())
        return conj(*items)

    def factor(self):
        if self.accept("~"):
            return Not(self.factor())
        if self.accept("("):
            p = self.prop()
            self.expect(")")
            return p
        tok = self.tok
        if tok.kind == "ident" and tok.text == "F":
            self.i += 1
            self.expect("[")
            t = self.time()
            self.expect("]")
            self.expect("(")
            ev = self.evexpr()
            self.expect(")")
            return FutureAtom(t, ev, (tok.line, tok.col))
        if tok.kind == "ident" and tok.text == "N":
            self.i += 1
            self.expect("(")
            ev = self.evexpr()
            self.expect(")")
            return NowAtom(ev, (tok.line, tok.col))
        self.fail(["'F'", "'N'", "'~'", "'('"])

    def time(self):
        tok = self.tok
        if self.template and tok.kind == "ident" and tok.text == TIME_SYMBOL:
            self.i += 1
            return TIME_SYMBOL
        if tok.kind != "number":
            self.fail(["number"] + (["'t'"] if self.template else []))
        self.i += 1
        t = float(tok.text)
        if not t > 0:
            raise PropSyntaxError("F requires t > 0", tok.line, tok.col, ["positive number"])
        return t

    def evexpr(self):
        items = [self.evterm()]
        while self.accept("|"):
            items.append(self.evterm())
        return items[0] if len(items) == 1 else EvOr(tuple(items))

    def evterm(self):
        items = [self.evfac()]
        while self.accept("&"):
            items.append(self.evfac())
        return items[0] if len(items) == 1 else EvAnd(tuple(items))

    def evfac(self):
        if self.accept("~"):
            return EvNot(self.evfac())
        if self.accept("("):
            e = self.evexpr()
            self.expect(")")
            return e
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return EvName(tok.text)
        self.fail(["event name", "'~'", "'('"])


def parse(text: str, template: bool = False) -> Proposition:
    """Parse DSL text. With ``template=True`` the symbol ``t`` is accepted as a time."""
    return _Parser(text, template).parse()


# -- histories and normal forms -----------------------------------------------

def _sort_key_event(ev: frozenset) -> tuple:
    return (len(ev), tuple(sorted(ev)))


@dataclass(frozen=True)
class History:
    """Time-sorted steps ``(time, indices)``; time 0 is the present-tense component."""

    steps: tuple = ()

    @staticmethod
    def from_steps(steps) -> "History":
        merged: dict = {}
        for t, ev in steps:
            t = float(t)
            if t < 0:
                raise LogicError(f"negative time {t} in history")
            ev = frozenset(ev)
            merged[t] = merged[t] & ev if t in merged else ev
        return History(tuple(sorted(merged.items(), key=lambda s: s[0])))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def times(self) -> tuple:
        return tuple(t for t, _ in self.steps)

    @property
    def is_empty_event(self) -> bool:
        return any(not ev for _, ev in self.steps)

    def conjoin(self, other: "History") -> "History":
        return History.from_steps(self.steps + other.steps)

    def key(self) -> tuple:
        return tuple((t, tuple(sorted(ev))) for t, ev in self.steps)

    def __str__(self) -> str:
        if not self.steps:
            return "<true>"
        parts = []
        for t, ev in self.steps:
            s = "{" + ",".join(map(str, sorted(ev))) + "}"
            parts.append(f"N{s}" if t == 0 else f"F[{t!r}]{s}")
        return " & ".join(parts)


def conjoin_all(histories) -> History:
    steps = []
    for h in histories:
        steps.extend(h.steps)
    return History.from_steps(steps)


@dataclass(frozen=True)
class NormalForm:
    disjuncts: tuple = ()

    def __len__(self) -> int:
        return len(self.disjuncts)

    def __iter__(self):
        return iter(self.disjuncts)

    def canonical(self) -> "NormalForm":
        uniq = {h.key(): h for h in self.disjuncts}
        return NormalForm(tuple(uniq[k] for k in sorted(uniq)))

    def conjoin(self, other: "NormalForm") -> "NormalForm":
        """Distribute: (h1 | ... ) & (k1 | ...) without further simplification."""
        return NormalForm(tuple(h.conjoin(k) for h in self.disjuncts for k in other.disjuncts))

    def __str__(self) -> str:
        return " | ".join(f"({h})" for h in self.disjuncts) if self.disjuncts else "<false>"


def _product(a: list, b: list) -> list:
    if len(a) * len(b) > MAX_DISJUNCTS:
        raise BlowUpGuard(f"normal form exceeds {MAX_DISJUNCTS} disjuncts")
    return [x.conjoin(y) for x in a for y in b]


def _dnf(p: Proposition, model, positive: bool) -> list:
    if isinstance(p, FutureAtom):
        if p.time == TIME_SYMBOL:
            raise LogicError("free time symbol must be instantiated before normalization")
        ev = resolve_event(p.event, model)
        return [History.from_steps([(p.time, ev if positive else complement_event(ev, model))])]
    if isinstance(p, NowAtom):
        ev = resolve_event(p.event, model)
        return [History.from_steps([(0.0, ev if positive else complement_event(ev, model))])]
    if isinstance(p, Not):
        return _dnf(p.child, model, not positive)
    parts = [_dnf(c, model, positive) for c in p.children]
    if isinstance(p, And) == positive:
        out = parts[0]
        for part in parts[1:]:
            out = _product(out, part)
        return out
    out = [h for part in parts for h in part]
    if len(out) > MAX_DISJUNCTS:
        raise BlowUpGuard(f"normal form exceeds {MAX_DISJUNCTS} disjuncts")
    return out


def _merge_once(hs: list):
    """Join two histories that differ in the event at exactly one time.

    h & F_t(a)  |  h & F_t(b)  ==  h & F_t(a | b)   (F_t is a homomorphism)
    """
    for i, j in itertools.combinations(range(len(hs)), 2):
        a, b = hs[i], hs[j]
        if a.times != b.times:
            continue
        diff = [k for k, (sa, sb) in enumerate(zip(a.steps, b.steps)) if sa[1] != sb[1]]
        if len(diff) != 1:
            continue
        k = diff[0]
        steps = list(a.steps)
        steps[k] = (steps[k][0], a.steps[k][1] | b.steps[k][1])
        rest = [h for n, h in enumerate(hs) if n not in (i, j)]
        return rest + [History(tuple(steps))]
    return None


def simplify(nf: NormalForm) -> NormalForm:
    """Drop empty-event histories, merge same-time unions, dedupe and sort."""
    hs = list(NormalForm(tuple(h for h in nf.disjuncts if not h.is_empty_event)).canonical().disjuncts)
    while True:
        merged = _merge_once(hs)
        if merged is None:
            break
        hs = list(NormalForm(tuple(merged)).canonical().disjuncts)
    return NormalForm(tuple(hs))


def normalize(p: Proposition, model) -> NormalForm:
    """Disjunction of histories equivalent to ``p``, negations pushed onto events."""
    return simplify(NormalForm(tuple(_dnf(p, model, True))))


def nf_to_prop(nf: NormalForm, names: dict) -> Proposition:
    """Rebuild an AST from a normal form; ``names`` maps index sets to event names."""
    if not nf.disjuncts:
        raise LogicError("cannot express the empty disjunction")
    hs = []
    for h in nf.disjuncts:
        parts = []
        for t, ev in h.steps:
            e = EvName(names[ev])
            parts.append(NowAtom(e) if t == 0 else FutureAtom(t, e))
        hs.append(conj(*parts))
    return disj(*hs)

"""One-way topological automata: machine types, execution, language sweeps.

A finite machine runs over an endmarked input: the left-marker operator (if
present), one operator per input symbol, then the right-marker operator; the
verdict is read off the final configuration once.  Deterministic machines
track a single point, nondeterministic ones a set of points (a mask).

Verdicts are three-valued.  A nondeterministic final set accepts when it
meets the accept set; rejection depends on reject_mode:

* "subset"   - the final set is nonempty and contained in the reject set
               (an empty final set is Undetermined),
* "disjoint" - the final set misses the accept set (vacuously true when
               empty).

Lazy machines expose the same run interface over an abstract configuration
space (vectors, stacks, counters) without an explicit topology.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import (
    BudgetExceeded,
    EndmarkerMode,
    InvalidMachine,
    InvariantViolation,
    MachineError,
    UnknownSymbol,
)
from .operators import (
    Op,
    SingleOp,
    compose_chain,
    continuity_witness,
    homeomorphism_failure,
    ops_homeomorphic,
    pairs_homeomorphic,
)
from .topology import (
    FiniteTopology,
    discrete_topology,
    iter_bits,
    mask_of,
)

LEND = "lend"
REND = "rend"

DEFAULT_WORD_BUDGET = 1 << 21


class Verdict(Enum):
    ACCEPT = _kernels.ACCEPT
    REJECT = _kernels.REJECT
    UNDETERMINED = _kernels.UNDETERMINED

    @property
    def code(self) -> int:
        return self.value


_VERDICT_BY_CODE = {v.code: v for v in Verdict}


# ------------------------------------------------------------------- types

@dataclass(frozen=True)
class ObservablePair:
    """Disjoint accept/reject point sets; everything else is E_non."""

    accept_mask: int
    reject_mask: int

    def __post_init__(self):
        if self.accept_mask & self.reject_mask:
            raise MachineError("accept and reject sets must be disjoint")

    def classify(self, point: int) -> Verdict:
        if (self.accept_mask >> point) & 1:
            return Verdict.ACCEPT
        if (self.reject_mask >> point) & 1:
            return Verdict.REJECT
        return Verdict.UNDETERMINED


@dataclass(frozen=True, eq=True)
class FiniteTopMachine:
    """A 1dta/1nta over an explicit finite topology.

    ops maps each alphabet symbol, plus optionally "lend"/"rend", to its
    transition operator.  All operators are SingleOp (deterministic) or all
    MultiOp (nondeterministic).
    """

    alphabet: tuple[str, ...]
    topology: FiniteTopology
    ops: dict[str, Op]
    initial: int
    observable: ObservablePair
    reject_mode: str = "subset"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "ops", dict(self.ops))

    @property
    def has_lend(self) -> bool:
        return LEND in self.ops

    @property
    def has_rend(self) -> bool:
        return REND in self.ops

    @property
    def endmarked(self) -> bool:
        return self.has_lend and self.has_rend

    @property
    def markless(self) -> bool:
        return not self.has_lend and not self.has_rend

    @property
    def deterministic(self) -> bool:
        return all(isinstance(op, SingleOp) for op in self.ops.values())

    def op(self, symbol: str) -> Op:
        try:
            return self.ops[symbol]
        except KeyError:
            raise UnknownSymbol(f"no operator for symbol {symbol!r}") from None


@dataclass
class LazyTopMachine:
    """Machine over a lazy configuration space.

    step(config, symbol) returns the next configuration (deterministic) or a
    sequence of configurations (nondeterministic; configs must be hashable).
    classify is total on reachable configurations.  An optional invariant
    hook returns a violation message for a bad configuration; runs check it
    at every step.
    """

    alphabet: tuple[str, ...]
    endmarked: bool
    init: Callable[[], Any]
    step: Callable[[Any, str], Any]
    classify: Callable[[Any], Verdict]
    deterministic: bool = True
    reject_mode: str = "subset"
    render: Callable[[Any], str] = repr
    invariant: Callable[[Any], str | None] | None = None
    name: str = ""

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)


Machine = FiniteTopMachine | LazyTopMachine


@dataclass(frozen=True)
class Dfa:
    """Classical finite automaton (output of the quotient construction)."""

    n_states: int
    alphabet: tuple[str, ...]
    transitions: dict[str, tuple[int, ...]]
    start: int
    accept_states: frozenset[int]
    reject_states: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "accept_states", frozenset(self.accept_states))
        object.__setattr__(self, "reject_states", frozenset(self.reject_states))
        if self.accept_states & self.reject_states:
            raise MachineError("accept and reject states must be disjoint")
        if not 0 <= self.start < self.n_states:
            raise MachineError(f"start state {self.start} out of range")
        for sym, row in self.transitions.items():
            if len(row) != self.n_states or any(
                    not 0 <= q < self.n_states for q in row):
                raise MachineError(f"transition row for {sym!r} is not total")

    def to_machine(self) -> FiniteTopMachine:
        """The equivalent machine over the discrete topology."""
        ops = {sym: SingleOp(self.n_states, tuple(row))
               for sym, row in self.transitions.items()}
        return FiniteTopMachine(
            alphabet=self.alphabet,
            topology=discrete_topology(self.n_states),
            ops=ops,
            initial=self.start,
            observable=ObservablePair(mask_of(self.accept_states),
                                      mask_of(self.reject_states)),
            name="dfa",
        )


# -------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def require(self):
        if self.violations:
            raise InvalidMachine(self.violations)


def validate_machine(m: Machine) -> ValidationReport:
    if isinstance(m, LazyTopMachine):
        return _validate_lazy(m)
    report = ValidationReport()
    t = m.topology
    n = t.n_points
    if not m.alphabet:
        report.violations.append("alphabet is empty")
    if len(set(m.alphabet)) != len(m.alphabet):
        report.violations.append("alphabet has repeated symbols")
    if LEND in m.alphabet or REND in m.alphabet:
        report.violations.append("alphabet symbols collide with endmarker keys")
    expected = set(m.alphabet)
    got = set(m.ops) - {LEND, REND}
    if expected != got:
        report.violations.append(
            f"operators keyed by {sorted(got)} do not match alphabet "
            f"{sorted(expected)}")
    kinds = {type(op) for op in m.ops.values()}
    if len(kinds) > 1:
        report.violations.append("mixed single- and multi-valued operators")
    if m.reject_mode not in ("subset", "disjoint"):
        report.violations.append(f"unknown reject_mode {m.reject_mode!r}")
    if not 0 <= m.initial < n:
        report.violations.append(f"initial configuration {m.initial} out of range")
    # the open-set axioms reduce to Alexandrov consistency of the canonical
    # minimal-neighborhood table; the pairwise family check would be
    # quadratic in the number of opens (prohibitive for hyperspaces)
    for x in range(n):
        mx = t.mins[x]
        if not (mx >> x) & 1 or not t.is_open(mx):
            report.violations.append(f"topology axioms fail at point {x}")
            break
    for sym, op in m.ops.items():
        if op.n_points != n:
            report.violations.append(f"operator for {sym!r} has wrong size")
            continue
        w = continuity_witness(t, op)
        if w is not None:
            report.violations.append(
                f"operator for {sym!r} is not continuous (witness point {w})")
    obs = m.observable
    full = t.full
    if (obs.accept_mask | obs.reject_mask) & ~full:
        report.violations.append("observable leaves the space")
    else:
        if not t.is_clopen(obs.accept_mask):
            report.violations.append("accept set is not clopen")
        if not t.is_clopen(obs.reject_mask):
            report.violations.append("reject set is not clopen")
    return report


def _validate_lazy(m: LazyTopMachine) -> ValidationReport:
    report = ValidationReport()
    if not m.alphabet:
        report.violations.append("alphabet is empty")
    if m.reject_mode not in ("subset", "disjoint"):
        report.violations.append(f"unknown reject_mode {m.reject_mode!r}")
    try:
        c0 = m.init()
    except Exception as exc:
        report.violations.append(f"init() fails: {exc}")
        return report
    if m.invariant is not None:
        msg = m.invariant(c0)
        if msg:
            report.violations.append(f"initial configuration violates: {msg}")
    symbols = list(m.alphabet) + ([LEND, REND] if m.endmarked else [])
    for sym in symbols:
        try:
            nxt = m.step(c0, sym)
            targets = [nxt] if m.deterministic else list(nxt)
            if not all(isinstance(m.classify(c), Verdict) for c in targets):
                report.violations.append(f"classify not total after {sym!r}")
        except Exception as exc:
            report.violations.append(f"step or classify on {sym!r} fails: {exc}")
    return report


def require_valid(m: Machine) -> Machine:
    validate_machine(m).require()
    return m


# ------------------------------------------------------------------- runs

@dataclass
class RunResult:
    verdict: Verdict
    trace: list[tuple[str, Any]]

    @property
    def final(self):
        return self.trace[-1][1]


def word_symbols(m: Machine, word: Sequence[str] | str) -> list[str]:
    symbols = list(word)
    alpha = set(m.alphabet)
    for s in symbols:
        if s not in alpha:
            raise UnknownSymbol(f"symbol {s!r} not in alphabet")
    return symbols


def _extended(m: Machine, symbols: list[str]) -> list[str]:
    if isinstance(m, LazyTopMachine):
        return [LEND] + symbols + [REND] if m.endmarked else symbols
    out = []
    if m.has_lend:
        out.append(LEND)
    out.extend(symbols)
    if m.has_rend:
        out.append(REND)
    return out


def run_word(m: Machine, word: Sequence[str] | str) -> RunResult:
    """Run one word and classify the final configuration."""
    symbols = _extended(m, word_symbols(m, word))
    if isinstance(m, LazyTopMachine):
        return _run_lazy(m, symbols)
    if m.deterministic:
        v = m.initial
        trace: list[tuple[str, Any]] = [("init", v)]
        for sym in symbols:
            v = m.op(sym)(v)
            trace.append((sym, v))
        return RunResult(m.observable.classify(v), trace)
    cur = 1 << m.initial
    trace = [("init", cur)]
    for sym in symbols:
        cur = m.op(sym).image(cur)
        trace.append((sym, cur))
    return RunResult(_classify_mask(m, cur), trace)


def _classify_mask(m: FiniteTopMachine, final: int) -> Verdict:
    obs = m.observable
    if final & obs.accept_mask:
        return Verdict.ACCEPT
    if m.reject_mode == "disjoint":
        return Verdict.REJECT
    if final != 0 and final & ~obs.reject_mask == 0:
        return Verdict.REJECT
    return Verdict.UNDETERMINED


def _check_invariant(m: LazyTopMachine, config):
    if m.invariant is not None:
        msg = m.invariant(config)
        if msg:
            raise InvariantViolation(f"{m.name or 'lazy machine'}: {msg}")


def _run_lazy(m: LazyTopMachine, symbols: list[str]) -> RunResult:
    if m.deterministic:
        c = m.init()
        _check_invariant(m, c)
        trace: list[tuple[str, Any]] = [("init", c)]
        for sym in symbols:
            c = m.step(c, sym)
            _check_invariant(m, c)
            trace.append((sym, c))
        return RunResult(m.classify(c), trace)
    cur = {m.init()}
    for c in cur:
        _check_invariant(m, c)
    trace = [("init", frozenset(cur))]
    for sym in symbols:
        nxt = set()
        for c in cur:
            for c2 in m.step(c, sym):
                _check_invariant(m, c2)
                nxt.add(c2)
        cur = nxt
        trace.append((sym, frozenset(cur)))
    return RunResult(_classify_lazy_set(m, cur), trace)


def _classify_lazy_set(m: LazyTopMachine, configs: set) -> Verdict:
    verdicts = {m.classify(c) for c in configs}
    if Verdict.ACCEPT in verdicts:
        return Verdict.ACCEPT
    if m.reject_mode == "disjoint":
        return Verdict.REJECT
    if configs and verdicts == {Verdict.REJECT}:
        return Verdict.REJECT
    return Verdict.UNDETERMINED


# ------------------------------------------------------------ enumeration

def canonical_symbols(m: Machine) -> list[str]:
    return sorted(m.alphabet)


def iter_words(alphabet: Iterable[str], max_len: int) -> Iterator[str]:
    """All words of length <= max_len, shortest first, lexicographic within
    a length (the canonical order used for sweeps and counterexamples)."""
    symbols = sorted(alphabet)
    level = [""]
    for _ in range(max_len + 1):
        yield from level
        level = [w + s for w in level for s in symbols]


def word_at_index(alphabet: Iterable[str], index: int) -> str:
    """Inverse of the canonical enumeration order."""
    symbols = sorted(alphabet)
    m = len(symbols)
    length = 0
    block = 1
    while index >= block:
        index -= block
        length += 1
        block *= m
    out = []
    for _ in range(length):
        index, r = divmod(index, m)
        out.append(symbols[r])
    return "".join(reversed(out))


def _check_budget(n_symbols: int, max_len: int, budget: int) -> int:
    total = _kernels.sweep_size(n_symbols, max_len)
    if total > budget:
        raise BudgetExceeded(
            f"{total} words of length <= {max_len} exceed the budget {budget}")
    return total


def verdict_vector(m: Machine, max_len: int,
                   budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Verdict codes for every word of length <= max_len in canonical order."""
    symbols = canonical_symbols(m)
    _check_budget(len(symbols), max_len, budget)
    if isinstance(m, LazyTopMachine):
        return _lazy_sweep(m, symbols, max_len)
    n = m.topology.n_points
    if m.deterministic:
        tables = np.array([m.ops[s].table for s in symbols], dtype=np.int64)
        ident = np.arange(n, dtype=np.int64)
        lend = np.array(m.ops[LEND].table, dtype=np.int64) if m.has_lend else ident
        rend = np.array(m.ops[REND].table, dtype=np.int64) if m.has_rend else ident
        klass = np.array([m.observable.classify(v).code for v in range(n)],
                         dtype=np.uint8)
        return _kernels.dta_sweep(tables, lend, rend, m.initial, klass, max_len)
    if n <= 62:
        img = np.array([m.ops[s].table for s in symbols], dtype=np.int64)
        ident = np.array([1 << v for v in range(n)], dtype=np.int64)
        lend = np.array(m.ops[LEND].table, dtype=np.int64) if m.has_lend else ident
        rend = np.array(m.ops[REND].table, dtype=np.int64) if m.has_rend else ident
        return _kernels.nta_sweep(img, lend, rend, 1 << m.initial,
                                  m.observable.accept_mask,
                                  m.observable.reject_mask,
                                  m.reject_mode == "subset", max_len)
    return _nta_sweep_bigint(m, symbols, max_len)


def _nta_sweep_bigint(m: FiniteTopMachine, symbols: list[str],
                      max_len: int) -> np.ndarray:
    out = []
    start = 1 << m.initial
    if m.has_lend:
        start = m.ops[LEND].image(start)
    level = [start]
    for k in range(max_len + 1):
        for mask in level:
            final = m.ops[REND].image(mask) if m.has_rend else mask
            out.append(_classify_mask(m, final).code)
        if k < max_len:
            level = [m.ops[s].image(mask) for mask in level for s in symbols]
    return np.array(out, dtype=np.uint8)


def _lazy_sweep(m: LazyTopMachine, symbols: list[str],
                max_len: int) -> np.ndarray:
    out = []
    if m.deterministic:
        c0 = m.init()
        if m.endmarked:
            c0 = m.step(c0, LEND)
        level = [c0]
        for k in range(max_len + 1):
            for c in level:
                final = m.step(c, REND) if m.endmarked else c
                out.append(m.classify(final).code)
            if k < max_len:
                level = [m.step(c, s) for c in level for s in symbols]
    else:
        s0 = frozenset([m.init()])
        if m.endmarked:
            s0 = frozenset(c2 for c in s0 for c2 in m.step(c, LEND))
        level = [s0]
        for k in range(max_len + 1):
            for cs in level:
                if m.endmarked:
                    final = {c2 for c in cs for c2 in m.step(c, REND)}
                else:
                    final = set(cs)
                out.append(_classify_lazy_set(m, final).code)
            if k < max_len:
                level = [frozenset(c2 for c in cs for c2 in m.step(c, s))
                         for cs in level for s in symbols]
    return np.array(out, dtype=np.uint8)


@dataclass
class LanguageSample:
    accepted: tuple[str, ...]
    rejected: tuple[str, ...]
    undetermined: tuple[str, ...]


def enumerate_language(m: Machine, max_len: int,
                       budget: int = DEFAULT_WORD_BUDGET) -> LanguageSample:
    """Classify every word of length <= max_len."""
    codes = verdict_vector(m, max_len, budget)
    buckets: dict[int, list[str]] = {v.code: [] for v in Verdict}
    for word, code in zip(iter_words(m.alphabet, max_len), codes):
        buckets[int(code)].append(word)
    return LanguageSample(tuple(buckets[Verdict.ACCEPT.code]),
                          tuple(buckets[Verdict.REJECT.code]),
                          tuple(buckets[Verdict.UNDETERMINED.code]))


# --------------------------------------------------------------- slimness

def reachable_mask(m: FiniteTopMachine) -> int:
    """Closure of {initial} under the alphabet operators (markless view)."""
    seen = 1 << m.initial
    work = [m.initial]
    while work:
        v = work.pop()
        for sym in m.alphabet:
            op = m.ops[sym]
            img = (1 << op(v)) if isinstance(op, SingleOp) else op(v)
            new = img & ~seen
            seen |= new
            work.extend(iter_bits(new))
    return seen


@dataclass
class SlimReport:
    slim: bool
    unreachable_mask: int


def is_slim(m: FiniteTopMachine) -> SlimReport:
    """A markless machine is slim when every point is reachable from the
    initial configuration by some input word."""
    if not m.markless:
        raise EndmarkerMode("slimness is defined for markless machines")
    reach = reachable_mask(m)
    return SlimReport(reach == m.topology.full, m.topology.full & ~reach)


# ----------------------------------------------------------- homeomorphism

def machine_homeomorphism_failure(m1: FiniteTopMachine, m2: FiniteTopMachine,
                                  f: SingleOp) -> str | None:
    """None when f witnesses that the machines are homeomorphic."""
    if sorted(m1.alphabet) != sorted(m2.alphabet):
        return "alphabets differ"
    if set(m1.ops) != set(m2.ops):
        return "endmarker modes differ"
    if f.table[m1.initial] != m2.initial:
        return "initial configurations do not correspond"
    fail = homeomorphism_failure(m1.topology, m2.topology, f)
    if fail:
        return f"spaces not homeomorphic: {fail}"
    for sym in m1.ops:
        if not ops_homeomorphic(m1.ops[sym], m2.ops[sym], f):
            return f"operators for {sym!r} do not correspond"
    if not pairs_homeomorphic(
            (m1.observable.accept_mask, m1.observable.reject_mask),
            (m2.observable.accept_mask, m2.observable.reject_mask), f):
        return "observable pairs do not correspond"
    return None


def machines_homeomorphic(m1: FiniteTopMachine, m2: FiniteTopMachine,
                          f: SingleOp) -> bool:
    return machine_homeomorphism_failure(m1, m2, f) is None


# ------------------------------------------------------------------ misc

def chain_operator(m: FiniteTopMachine, word: Sequence[str] | str) -> Op:
    """The composed operator of an endmarked run on the given word."""
    symbols = _extended(m, word_symbols(m, word))
    return compose_chain([m.op(s) for s in symbols], m.topology.n_points)


def verdict_from_code(code: int) -> Verdict:
    return _VERDICT_BY_CODE[int(code)]

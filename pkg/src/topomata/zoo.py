"""Classical machine families encoded as topological automata.

Finite automata become machines over the discrete topology; probabilistic,
generalized, quantum and pushdown automata become lazy machines whose
configurations are vectors, density matrices or stacks.  All numeric
classification uses one global tolerance; probabilistic machines offer an
exact-rational mode for reproducible cut-point experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import MachineError
from .machine import (
    LEND,
    REND,
    Dfa,
    FiniteTopMachine,
    LazyTopMachine,
    ObservablePair,
    Verdict,
    validate_machine,
)
from .operators import MultiOp, SingleOp
from .topology import discrete_topology, mask_of, validate_topology, pts

TOLERANCE = 1e-9


# ---------------------------------------------------------------- classical

@dataclass(frozen=True)
class NfaTable:
    """Plain nondeterministic transition table."""

    n_states: int
    alphabet: tuple[str, ...]
    transitions: dict[str, tuple[frozenset, ...]]
    start: int
    accept_states: frozenset[int]
    reject_states: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions",
                           {s: tuple(frozenset(t) for t in row)
                            for s, row in self.transitions.items()})
        object.__setattr__(self, "accept_states", frozenset(self.accept_states))
        object.__setattr__(self, "reject_states", frozenset(self.reject_states))


def classical_import(a: Dfa | NfaTable) -> FiniteTopMachine:
    """View a classical automaton as a machine over the discrete topology,
    which makes every operator continuous and every observable clopen."""
    if isinstance(a, Dfa):
        m = a.to_machine()
    elif isinstance(a, NfaTable):
        ops = {sym: MultiOp(a.n_states, tuple(mask_of(t) for t in row))
               for sym, row in a.transitions.items()}
        m = FiniteTopMachine(
            alphabet=a.alphabet,
            topology=discrete_topology(a.n_states),
            ops=ops,
            initial=a.start,
            observable=ObservablePair(mask_of(a.accept_states),
                                      mask_of(a.reject_states)),
            name="nfa")
    else:
        raise TypeError(f"cannot import {type(a).__name__}")
    validate_machine(m).require()
    return m


# ------------------------------------------------------- language machines

def language_machine(pred: Callable[[str], bool], alphabet: Iterable[str],
                     endmarked: bool) -> LazyTopMachine:
    """Machine whose configurations are the input read so far.

    Markless: classify the word directly.  Endmarked: the right marker maps
    the word to an accept/reject sentinel and classification happens there.
    """
    alphabet = tuple(alphabet)

    if not endmarked:
        def step(c, sym):
            return c + sym

        def classify(c):
            return Verdict.ACCEPT if pred(c) else Verdict.REJECT

        return LazyTopMachine(alphabet, False, lambda: "", step, classify,
                              render=lambda c: c or "(empty)",
                              name="language")

    def step(c, sym):
        kind, payload = c
        if kind == "sentinel":
            raise MachineError("step after the right endmarker")
        if sym == LEND:
            return c
        if sym == REND:
            return ("sentinel", bool(pred(payload)))
        return ("word", payload + sym)

    def classify(c):
        kind, payload = c
        if kind != "sentinel":
            return Verdict.UNDETERMINED
        return Verdict.ACCEPT if payload else Verdict.REJECT

    return LazyTopMachine(alphabet, True, lambda: ("word", ""), step, classify,
                          render=lambda c: f"{c[0]}:{c[1]}", name="language")


# ------------------------------------------------------------ probabilistic

def _as_fraction_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass
class StochasticSpec:
    """Column-stochastic matrices per extended symbol with a cut parameter."""

    alphabet: tuple[str, ...]
    dim: int
    matrices: dict[str, Any]
    epsilon: Any
    accept_ix: tuple[int, ...]
    reject_ix: tuple[int, ...]
    initial: Sequence | None = None
    exact: bool = False

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        self.accept_ix = tuple(self.accept_ix)
        self.reject_ix = tuple(self.reject_ix)
        if set(self.accept_ix) & set(self.reject_ix):
            raise MachineError("accept and reject coordinates overlap")
        self.epsilon = Fraction(self.epsilon) if self.exact else float(self.epsilon)
        if not 0 <= self.epsilon < 1:
            raise MachineError("cut parameter must lie in [0, 1)")
        self.matrices = dict(self.matrices)
        for sym, mat in self.matrices.items():
            if self.exact:
                m = _as_fraction_matrix(mat)
                sums = [sum(m[i][j] for i in range(self.dim))
                        for j in range(self.dim)]
                bad = any(s != 1 for s in sums) or any(
                    x < 0 for row in m for x in row)
            else:
                m = np.asarray(mat, dtype=np.float64)
                bad = (m.shape != (self.dim, self.dim)
                       or (m < -TOLERANCE).any()
                       or not np.allclose(m.sum(axis=0), 1.0, atol=TOLERANCE))
            if bad:
                raise MachineError(f"matrix for {sym!r} is not column-stochastic")
            self.matrices[sym] = m

    @property
    def endmarked(self) -> bool:
        return LEND in self.matrices and REND in self.matrices


def make_pfa(spec: StochasticSpec) -> LazyTopMachine:
    """Probabilistic machine: configurations are probability column vectors,
    accept/reject when the respective coordinate mass reaches 1 - epsilon."""
    k = spec.dim
    if spec.exact:
        one = Fraction(1)
        thresh = one - Fraction(spec.epsilon)
        if spec.initial is None:
            init_v = tuple([one] + [Fraction(0)] * (k - 1))
        else:
            init_v = tuple(Fraction(x) for x in spec.initial)
        if sum(init_v) != 1 or any(x < 0 for x in init_v):
            raise MachineError("initial vector is not a distribution")

        def step(v, sym):
            m = spec.matrices[sym]
            return tuple(sum(m[i][j] * v[j] for j in range(k)) for i in range(k))

        def classify(v):
            p_acc = sum(v[i] for i in spec.accept_ix)
            p_rej = sum(v[i] for i in spec.reject_ix)
            hit_acc, hit_rej = p_acc >= thresh, p_rej >= thresh
            if hit_acc and not hit_rej:
                return Verdict.ACCEPT
            if hit_rej and not hit_acc:
                return Verdict.REJECT
            return Verdict.UNDETERMINED

        def invariant(v):
            if sum(v) != 1 or any(x < 0 for x in v):
                return "vector is not a probability distribution"
            return None

        return LazyTopMachine(spec.alphabet, spec.endmarked, lambda: init_v,
                              step, classify, invariant=invariant,
                              render=lambda v: str([str(x) for x in v]),
                              name="pfa-exact")

    thresh = 1.0 - float(spec.epsilon)
    if spec.initial is None:
        init = np.zeros(k)
        init[0] = 1.0
    else:
        init = np.asarray(spec.initial, dtype=np.float64)
        if init.shape != (k,) or (init < -TOLERANCE).any() \
                or abs(init.sum() - 1.0) > TOLERANCE:
            raise MachineError("initial vector is not a distribution")

    def step(v, sym):
        return spec.matrices[sym] @ v

    def classify(v):
        p_acc = float(v[list(spec.accept_ix)].sum()) if spec.accept_ix else 0.0
        p_rej = float(v[list(spec.reject_ix)].sum()) if spec.reject_ix else 0.0
        hit_acc = p_acc >= thresh - TOLERANCE
        hit_rej = p_rej >= thresh - TOLERANCE
        if hit_acc and not hit_rej:
            return Verdict.ACCEPT
        if hit_rej and not hit_acc:
            return Verdict.REJECT
        return Verdict.UNDETERMINED

    def invariant(v):
        if (v < -TOLERANCE).any() or abs(float(v.sum()) - 1.0) > TOLERANCE:
            return "vector is not a probability distribution"
        return None

    return LazyTopMachine(spec.alphabet, spec.endmarked, lambda: init.copy(),
                          step, classify, invariant=invariant,
                          render=lambda v: np.array2string(v, precision=6),
                          name="pfa")


def make_gfa(alphabet: Iterable[str], matrices: Mapping[str, Any],
             accept_ix: Iterable[int], reject_ix: Iterable[int],
             tolerance: float = TOLERANCE,
             initial: Sequence | None = None) -> LazyTopMachine:
    """Generalized machine over real vectors.  Acceptance is literal
    subspace membership: every coordinate outside the accept (resp. reject)
    index set vanishes within tolerance.  A vector inside both subspaces
    (only the zero vector can be) is Undetermined."""
    alphabet = tuple(alphabet)
    mats = {s: np.asarray(m, dtype=np.float64) for s, m in matrices.items()}
    k = next(iter(mats.values())).shape[0]
    accept_ix, reject_ix = set(accept_ix), set(reject_ix)
    if accept_ix & reject_ix:
        raise MachineError("accept and reject coordinates overlap")
    if initial is None:
        init = np.zeros(k)
        init[0] = 1.0
    else:
        init = np.asarray(initial, dtype=np.float64)
    outside_acc = [i for i in range(k) if i not in accept_ix]
    outside_rej = [i for i in range(k) if i not in reject_ix]

    def classify(v):
        in_acc = all(abs(float(v[i])) <= tolerance for i in outside_acc)
        in_rej = all(abs(float(v[i])) <= tolerance for i in outside_rej)
        if in_acc and not in_rej:
            return Verdict.ACCEPT
        if in_rej and not in_acc:
            return Verdict.REJECT
        return Verdict.UNDETERMINED

    endmarked = LEND in mats and REND in mats
    return LazyTopMachine(alphabet, endmarked, lambda: init.copy(),
                          lambda v, s: mats[s] @ v, classify,
                          render=lambda v: np.array2string(v, precision=6),
                          name="gfa")


# ----------------------------------------------------------------- quantum

@dataclass
class QuantumSpec:
    """Unitary matrices (measure-once / measure-many) or Kraus families
    (superoperator variant) per extended symbol, plus projection index sets."""

    alphabet: tuple[str, ...]
    dim: int
    epsilon: float
    accept_ix: tuple[int, ...]
    reject_ix: tuple[int, ...]
    matrices: dict[str, Any] | None = None
    kraus: dict[str, Any] | None = None
    initial: Sequence | None = None

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        self.accept_ix = tuple(self.accept_ix)
        self.reject_ix = tuple(self.reject_ix)
        if set(self.accept_ix) & set(self.reject_ix):
            raise MachineError("projection index sets overlap")
        if not 0 <= self.epsilon < 1:
            raise MachineError("cut parameter must lie in [0, 1)")
        if (self.matrices is None) == (self.kraus is None):
            raise MachineError("provide either unitaries or Kraus families")
        eye = np.eye(self.dim)
        if self.matrices is not None:
            self.matrices = {s: np.asarray(m, dtype=np.complex128)
                             for s, m in self.matrices.items()}
            for sym, u in self.matrices.items():
                if u.shape != (self.dim, self.dim) or not np.allclose(
                        u.conj().T @ u, eye, atol=TOLERANCE):
                    raise MachineError(f"matrix for {sym!r} is not unitary")
        else:
            self.kraus = {s: [np.asarray(a, dtype=np.complex128) for a in fam]
                          for s, fam in self.kraus.items()}
            for sym, fam in self.kraus.items():
                total = sum(a.conj().T @ a for a in fam)
                if not np.allclose(total, eye, atol=TOLERANCE):
                    raise MachineError(
                        f"Kraus family for {sym!r} is not trace-preserving")

    @property
    def endmarked(self) -> bool:
        ops = self.matrices if self.matrices is not None else self.kraus
        return LEND in ops and REND in ops

    def initial_vector(self) -> np.ndarray:
        if self.initial is None:
            v = np.zeros(self.dim, dtype=np.complex128)
            v[0] = 1.0
        else:
            v = np.asarray(self.initial, dtype=np.complex128)
        if abs(np.linalg.norm(v) - 1.0) > TOLERANCE:
            raise MachineError("initial vector is not normalized")
        return v


def _project(v: np.ndarray, ix: tuple[int, ...]) -> np.ndarray:
    out = np.zeros_like(v)
    for i in ix:
        out[i] = v[i]
    return out


def make_mo_qfa(spec: QuantumSpec) -> LazyTopMachine:
    """Measure-once quantum machine: unit vectors evolve by unitaries and
    are measured once at the end against the projection thresholds."""
    if spec.matrices is None:
        raise MachineError("measure-once machines need unitary matrices")
    thresh = 1.0 - spec.epsilon

    def classify(v):
        p_acc = float(np.linalg.norm(_project(v, spec.accept_ix)) ** 2)
        p_rej = float(np.linalg.norm(_project(v, spec.reject_ix)) ** 2)
        hit_acc = p_acc > thresh - TOLERANCE
        hit_rej = p_rej > thresh - TOLERANCE
        if hit_acc and not hit_rej:
            return Verdict.ACCEPT
        if hit_rej and not hit_acc:
            return Verdict.REJECT
        return Verdict.UNDETERMINED

    def invariant(v):
        if abs(float(np.linalg.norm(v)) - 1.0) > TOLERANCE:
            return "state norm drifted from 1"
        return None

    return LazyTopMachine(spec.alphabet, spec.endmarked,
                          spec.initial_vector,
                          lambda v, s: spec.matrices[s] @ v, classify,
                          invariant=invariant,
                          render=lambda v: np.array2string(v, precision=6),
                          name="mo-qfa")


def mm_qfa_step(spec: QuantumSpec, config, sym: str):
    """One measure-many evolution step: apply the unitary, project onto the
    non-halting subspace, and fold the halting mass into the signed
    accumulators by the sgn/sqrt rule."""
    v, g1, g2 = config
    w = spec.matrices[sym] @ v
    non_ix = tuple(i for i in range(spec.dim)
                   if i not in spec.accept_ix and i not in spec.reject_ix)
    p_acc = float(np.linalg.norm(_project(w, spec.accept_ix)) ** 2)
    p_rej = float(np.linalg.norm(_project(w, spec.reject_ix)) ** 2)
    sgn1 = 1.0 if g1 >= 0 else -1.0
    sgn2 = 1.0 if g2 >= 0 else -1.0
    return (_project(w, non_ix),
            sgn1 * np.sqrt(g1 * g1 + p_acc),
            sgn2 * np.sqrt(g2 * g2 + p_rej))


def make_mm_qfa(spec: QuantumSpec) -> LazyTopMachine:
    """Measure-many quantum machine: configurations carry the non-halting
    residual vector plus the accumulated accept/reject amplitudes."""
    if spec.matrices is None:
        raise MachineError("measure-many machines need unitary matrices")
    thresh = 1.0 - spec.epsilon

    def classify(c):
        _, g1, g2 = c
        hit_acc = g1 >= thresh - TOLERANCE
        hit_rej = g2 >= thresh - TOLERANCE
        if hit_acc and not hit_rej:
            return Verdict.ACCEPT
        if hit_rej and not hit_acc:
            return Verdict.REJECT
        return Verdict.UNDETERMINED

    def invariant(c):
        v, g1, g2 = c
        total = g1 * g1 + g2 * g2 + float(np.linalg.norm(v) ** 2)
        if abs(total - 1.0) > TOLERANCE:
            return f"total mass {total} drifted from 1"
        return None

    return LazyTopMachine(spec.alphabet, spec.endmarked,
                          lambda: (spec.initial_vector(), 0.0, 0.0),
                          lambda c, s: mm_qfa_step(spec, c, s), classify,
                          invariant=invariant,
                          render=lambda c: (f"v={np.array2string(c[0], precision=4)} "
                                            f"g=({c[1]:.6f},{c[2]:.6f})"),
                          name="mm-qfa")


def make_superop_qfa(spec: QuantumSpec) -> LazyTopMachine:
    """Superoperator machine on density matrices: rho evolves by Kraus
    families and is classified by trace against the projections."""
    if spec.kraus is None:
        raise MachineError("superoperator machines need Kraus families")
    thresh = 1.0 - spec.epsilon

    def init():
        v = spec.initial_vector()
        return np.outer(v, v.conj())

    def step(rho, sym):
        return sum(a @ rho @ a.conj().T for a in spec.kraus[sym])

    def trace_on(rho, ix):
        return float(sum(rho[i, i].real for i in ix))

    def classify(rho):
        hit_acc = trace_on(rho, spec.accept_ix) >= thresh - TOLERANCE
        hit_rej = trace_on(rho, spec.reject_ix) >= thresh - TOLERANCE
        if hit_acc and not hit_rej:
            return Verdict.ACCEPT
        if hit_rej and not hit_acc:
            return Verdict.REJECT
        return Verdict.UNDETERMINED

    def invariant(rho):
        if abs(float(np.trace(rho).real) - 1.0) > TOLERANCE:
            return "trace drifted from 1"
        if not np.allclose(rho, rho.conj().T, atol=TOLERANCE):
            return "density matrix is not Hermitian"
        if np.linalg.eigvalsh(rho).min() < -TOLERANCE:
            return "density matrix is not positive semidefinite"
        return None

    return LazyTopMachine(spec.alphabet, spec.endmarked, init, step, classify,
                          invariant=invariant,
                          render=lambda r: np.array2string(r, precision=4),
                          name="superop-qfa")


# ---------------------------------------------------------------- pushdown

@dataclass
class PushdownSpec:
    """Per-symbol move functions on (state, stack top); the bottom marker is
    never popped and reading an empty stack reads the bottom row."""

    alphabet: tuple[str, ...]
    n_states: int
    stack_alphabet: tuple[str, ...]
    moves: dict[str, dict[tuple[int, str], tuple[tuple[int, str], ...]]]
    accept_states: frozenset[int]
    reject_states: frozenset[int]
    bottom: str = "Z"
    max_push: int = 2

    def __post_init__(self):
        self.alphabet = tuple(self.alphabet)
        self.stack_alphabet = tuple(self.stack_alphabet)
        self.accept_states = frozenset(self.accept_states)
        self.reject_states = frozenset(self.reject_states)
        if self.bottom in self.stack_alphabet:
            raise MachineError("bottom marker must not be a stack symbol")
        if self.accept_states & self.reject_states:
            raise MachineError("accept and reject states overlap")
        if self.accept_states | self.reject_states != set(range(self.n_states)):
            raise MachineError("accept/reject states must partition the states")
        tops = self.stack_alphabet + (self.bottom,)
        for sym, table in self.moves.items():
            for q in range(self.n_states):
                for z in tops:
                    branches = table.get((q, z))
                    if not branches:
                        raise MachineError(
                            f"move for symbol {sym!r} undefined on ({q}, {z!r})")
                    for _, push in branches:
                        if len(push) > self.max_push or any(
                                c not in self.stack_alphabet for c in push):
                            raise MachineError(
                                f"illegal push string {push!r} on {sym!r}")

    @property
    def endmarked(self) -> bool:
        return LEND in self.moves and REND in self.moves


def make_pushdown(spec: PushdownSpec, deterministic: bool = True
                  ) -> LazyTopMachine:
    """Pushdown machine: configurations are (state, bottom-rooted stack)."""

    def init():
        return (0, spec.bottom)

    def branches_of(config, sym):
        state, stack = config
        top = stack[-1]
        out = []
        for new_state, push in spec.moves[sym][(state, top)]:
            body = stack if top == spec.bottom else stack[:-1]
            out.append((new_state, body + push))
        return out

    def classify(c):
        return (Verdict.ACCEPT if c[0] in spec.accept_states
                else Verdict.REJECT)

    def render(c):
        return f"(q{c[0]}, {c[1]})"

    if deterministic:
        def step(c, sym):
            out = branches_of(c, sym)
            if len(out) != 1:
                raise MachineError(
                    f"deterministic pushdown has {len(out)} moves on {sym!r}")
            return out[0]

        return LazyTopMachine(spec.alphabet, spec.endmarked, init, step,
                              classify, render=render, name="dpda")
    return LazyTopMachine(spec.alphabet, spec.endmarked, init, branches_of,
                          classify, deterministic=False, render=render,
                          name="npda")


# --------------------------------------------------------- bundled examples

def zero_machine() -> FiniteTopMachine:
    """The three-point machine recognizing 0* over a non-Kolmogorov space."""
    t = validate_topology(3, [pts(), pts(0), pts(1, 2), pts(0, 1, 2)])
    ident = SingleOp.identity(3)
    m = FiniteTopMachine(
        alphabet=("0", "1"),
        topology=t,
        ops={"0": ident, "1": SingleOp(3, (1, 2, 2)),
             LEND: ident, REND: ident},
        initial=0,
        observable=ObservablePair(pts(0), pts(1, 2)),
        name="zero")
    validate_machine(m).require()
    return m


def ones_machine() -> FiniteTopMachine:
    """Symbol-swapped twin of the zero machine; recognizes 1*."""
    t = validate_topology(3, [pts(), pts(0), pts(1, 2), pts(0, 1, 2)])
    ident = SingleOp.identity(3)
    m = FiniteTopMachine(
        alphabet=("0", "1"),
        topology=t,
        ops={"1": ident, "0": SingleOp(3, (1, 2, 2)),
             LEND: ident, REND: ident},
        initial=0,
        observable=ObservablePair(pts(0), pts(1, 2)),
        name="ones")
    validate_machine(m).require()
    return m


def equal_machine() -> LazyTopMachine:
    """Integer counter over the discrete topology on Z: accepts the words
    with equally many a's and b's (a non-regular language)."""
    deltas = {"a": 1, "b": -1, LEND: 0, REND: 0}

    def classify(c):
        return Verdict.ACCEPT if c == 0 else Verdict.REJECT

    return LazyTopMachine(("a", "b"), True, lambda: 0,
                          lambda c, s: c + deltas[s], classify,
                          render=str, name="equal")


def dyck_machine() -> LazyTopMachine:
    """Balanced parentheses via a deterministic pushdown: push on '(', pop
    on ')', die on underflow, accept at the right marker iff the stack is
    down to the bottom."""
    run, dead, acc, rej = 0, 1, 2, 3
    tops = ("A", "Z")
    moves: dict[str, dict] = {"(": {}, ")": {}, LEND: {}, REND: {}}
    for q in (run, dead, acc, rej):
        for z in tops:
            keep = "" if z == "Z" else z
            moves["("][(q, z)] = ((q, keep + "A"),) if q == run else ((q, keep),)
            moves[LEND][(q, z)] = ((q, keep),)
            if q == run:
                moves[")"][(q, z)] = ((dead, keep),) if z == "Z" else ((q, ""),)
                moves[REND][(q, z)] = ((acc, keep),) if z == "Z" else ((rej, keep),)
            else:
                moves[")"][(q, z)] = ((q, keep),)
                moves[REND][(q, z)] = ((q if q in (acc, rej) else rej, keep),)
    spec = PushdownSpec(
        alphabet=("(", ")"), n_states=4, stack_alphabet=("A",), moves=moves,
        accept_states=frozenset({acc}),
        reject_states=frozenset({run, dead, rej}))
    m = make_pushdown(spec, deterministic=True)
    m.name = "dyck"
    return m


BUILTIN_NAMES = ("zero", "equal", "ones", "dyck")


def builtin_examples(name: str):
    if name == "zero":
        return zero_machine()
    if name == "equal":
        return equal_machine()
    if name == "ones":
        return ones_machine()
    if name == "dyck":
        return dyck_machine()
    raise ValueError(f"unknown builtin machine {name!r}")

"""Machine-to-machine transformations.

Every construction validates its output machine and raises rather than
returning a silently broken result.  Constructions that change the
configuration space (quotient, determinization, normalization) keep the
point numbering deterministic so converted machines serialize byte-stably.
"""

from __future__ import annotations

import warnings
from typing import Mapping

from .errors import (
    AcceptRejectClash,
    ClassMapConflict,
    ConstructionError,
    EmptyImage,
    EmptyObservable,
    EndmarkerMode,
    InitialNotOpen,
    PreconditionTopology,
)
from .machine import (
    LEND,
    REND,
    Dfa,
    FiniteTopMachine,
    LazyTopMachine,
    ObservablePair,
    Verdict,
    reachable_mask,
    validate_machine,
)
from .operators import (
    MultiOp,
    Op,
    SingleOp,
    compose,
    compose_chain,
    check_continuity,
    invert_multi,
    lift_operator,
    make_D_operator,
    restrict_operator,
)
from .topology import (
    DEFAULT_HYPERSPACE_CAP,
    discrete_topology,
    hyper_inside,
    hyper_meeting,
    indistinguishability_partition,
    iter_bits,
    product_topology,
    subspace_topology,
    vietoris_space,
)


class PartialObservableWarning(UserWarning):
    """A quotient class meets an observable set and the undetermined region."""


def _require_deterministic(m: FiniteTopMachine, what: str):
    if not m.deterministic:
        raise ConstructionError(f"{what} needs a deterministic machine")


def _as_multi(op: Op) -> MultiOp:
    return op.as_multi() if isinstance(op, SingleOp) else op


# ---------------------------------------------------------------- quotient

def quotient_to_dfa(m: FiniteTopMachine) -> Dfa:
    """Collapse topologically indistinguishable points into DFA states.

    Transition well-definedness (indistinguishable points stay
    indistinguishable under every operator) and the accept/reject separation
    are asserted; a class meeting an observable set and the undetermined
    region makes a partial machine and only triggers a warning.
    """
    _require_deterministic(m, "the quotient construction")
    if not m.endmarked:
        raise EndmarkerMode("the quotient construction expects both endmarkers")
    validate_machine(m).require()
    part = indistinguishability_partition(m.topology)
    class_of = [0] * m.topology.n_points
    for i, cmask in enumerate(part.classes):
        for v in iter_bits(cmask):
            class_of[v] = i

    transitions = {}
    for sym, op in m.ops.items():
        row = []
        for cmask in part.classes:
            points = list(iter_bits(cmask))
            targets = {class_of[op(v)] for v in points}
            if len(targets) > 1:
                v, w = points[0], next(
                    p for p in points if class_of[op(p)] != class_of[op(points[0])])
                raise ClassMapConflict(sym, v, w)
            row.append(targets.pop())
        transitions[sym] = tuple(row)

    acc = m.observable.accept_mask
    rej = m.observable.reject_mask
    non = m.topology.full & ~(acc | rej)
    accept_states, reject_states = set(), set()
    for i, cmask in enumerate(part.classes):
        hits_acc, hits_rej = cmask & acc, cmask & rej
        if hits_acc and hits_rej:
            raise AcceptRejectClash(cmask)
        if hits_acc:
            accept_states.add(i)
            if cmask & non:
                warnings.warn(PartialObservableWarning(
                    f"class {cmask:#x} mixes accepting and undetermined points"))
        if hits_rej:
            reject_states.add(i)
            if cmask & non:
                warnings.warn(PartialObservableWarning(
                    f"class {cmask:#x} mixes rejecting and undetermined points"))

    return Dfa(n_states=len(part.classes), alphabet=m.alphabet,
               transitions=transitions, start=class_of[m.initial],
               accept_states=frozenset(accept_states),
               reject_states=frozenset(reject_states))


# ---------------------------------------------------------- determinization

def _subset_dead_end_reachable(m: FiniteTopMachine) -> bool:
    """Can the configuration set become empty on some endmarked input?"""
    ops = {sym: _as_multi(op) for sym, op in m.ops.items()}
    start = 1 << m.initial
    if m.has_lend:
        start = ops[LEND].image(start)
    seen = {start}
    work = [start]
    while work:
        cur = work.pop()
        if cur == 0 or (m.has_rend and ops[REND].image(cur) == 0):
            return True
        for sym in m.alphabet:
            nxt = ops[sym].image(cur)
            if nxt not in seen:
                seen.add(nxt)
                work.append(nxt)
    return False


def vietoris_determinize(m: FiniteTopMachine, mode: str = "explicit",
                         cap: int = DEFAULT_HYPERSPACE_CAP) -> FiniteTopMachine:
    """Deterministic machine over configuration sets.

    explicit: configuration space is the Vietoris hyperspace over all
    nonempty subsets, operators are lifted unions, the accept observable is
    the subsets meeting the accept set and the reject observable the subsets
    inside the reject set (matching the "subset" rejection rule).  Requires
    {v0} open.  A machine whose set dynamics can die out has no faithful
    image in the nonempty-subset carrier and is refused; unreachable empty
    images are routed to the full-set sink.

    subset_semantics: plain subset construction over the reachable
    configuration sets (discrete topology, no hyperspace), honouring the
    machine's own reject_mode.
    """
    validate_machine(m).require()
    if mode == "explicit":
        return _determinize_explicit(m, cap)
    if mode == "subset_semantics":
        return _determinize_subsets(m)
    raise ValueError(f"unknown determinization mode {mode!r}")


def _determinize_explicit(m: FiniteTopMachine, cap: int) -> FiniteTopMachine:
    t = m.topology
    if not t.is_open(1 << m.initial):
        raise InitialNotOpen(
            "explicit determinization needs {v0} open in the input topology")
    hyper = vietoris_space(t, "all_nonempty_subsets", cap)
    ops = {sym: _as_multi(op) for sym, op in m.ops.items()}
    has_empty = any(mask == 0 for op in ops.values() for mask in op.table)
    sink_mode = "strict"
    if has_empty:
        if _subset_dead_end_reachable(m):
            raise EmptyImage(0, "the configuration set dies on a reachable "
                                "input; no nonempty-subset machine exists")
        sink_mode = "sink"
    lifted = {sym: lift_operator(op, hyper, empty_image=sink_mode)
              for sym, op in ops.items()}
    observable = ObservablePair(
        hyper_meeting(hyper, m.observable.accept_mask),
        hyper_inside(hyper, m.observable.reject_mask))
    out = FiniteTopMachine(
        alphabet=m.alphabet,
        topology=hyper.topology,
        ops=lifted,
        initial=hyper.index_of(1 << m.initial),
        observable=observable,
        name=f"{m.name or 'nta'}-det-explicit",
    )
    validate_machine(out).require()
    return out


def _determinize_subsets(m: FiniteTopMachine) -> FiniteTopMachine:
    ops = {sym: _as_multi(op) for sym, op in m.ops.items()}
    start = 1 << m.initial
    states = [start]
    index = {start: 0}
    work = [start]
    while work:
        cur = work.pop()
        for sym in ops:
            nxt = ops[sym].image(cur)
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
                work.append(nxt)
    tables = {sym: tuple(index[ops[sym].image(s)] for s in states)
              for sym in ops}
    acc_mask, rej_mask = 0, 0
    for i, s in enumerate(states):
        if s & m.observable.accept_mask:
            acc_mask |= 1 << i
        elif m.reject_mode == "disjoint":
            rej_mask |= 1 << i
        elif s != 0 and s & ~m.observable.reject_mask == 0:
            rej_mask |= 1 << i
    out = FiniteTopMachine(
        alphabet=m.alphabet,
        topology=discrete_topology(len(states)),
        ops={sym: SingleOp(len(states), tab) for sym, tab in tables.items()},
        initial=0,
        observable=ObservablePair(acc_mask, rej_mask),
        name=f"{m.name or 'nta'}-det-subset",
    )
    validate_machine(out).require()
    return out


# ----------------------------------------------------- endmarker elimination

def eliminate_left_endmarker(m: FiniteTopMachine) -> FiniteTopMachine:
    """Fold the left-marker operator into the others by conjugation; needs
    an invertible left-marker operator with a continuous inverse."""
    _require_deterministic(m, "left-endmarker elimination")
    if not m.has_lend:
        raise EndmarkerMode("machine has no left endmarker")
    validate_machine(m).require()
    b_lend: SingleOp = m.ops[LEND]
    inv = b_lend.inverse()  # NotInvertible when not a bijection
    if not check_continuity(m.topology, inv):
        raise ConstructionError(
            "inverse of the left-marker operator is not continuous")
    ops = {}
    for sym in m.alphabet:
        ops[sym] = compose(inv, compose(m.ops[sym], b_lend))
    observable = m.observable
    if m.has_rend:
        ops[REND] = compose(m.ops[REND], b_lend)
    else:
        # no trailing operator to absorb the conjugation: pull the
        # observable back instead
        observable = ObservablePair(b_lend.preimage(observable.accept_mask),
                                    b_lend.preimage(observable.reject_mask))
    out = FiniteTopMachine(
        alphabet=m.alphabet, topology=m.topology, ops=ops,
        initial=m.initial, observable=observable,
        reject_mode=m.reject_mode, name=f"{m.name}-nolend" if m.name else "")
    validate_machine(out).require()
    return out


def eliminate_right_endmarker(m: FiniteTopMachine) -> FiniteTopMachine:
    """Drop the right marker by pulling the observable back through it;
    clopenness of the preimages follows from continuity and is re-checked."""
    _require_deterministic(m, "right-endmarker elimination")
    if not m.has_rend:
        raise EndmarkerMode("machine has no right endmarker")
    validate_machine(m).require()
    b_rend: SingleOp = m.ops[REND]
    ops = {sym: op for sym, op in m.ops.items() if sym != REND}
    out = FiniteTopMachine(
        alphabet=m.alphabet, topology=m.topology, ops=ops,
        initial=m.initial,
        observable=ObservablePair(b_rend.preimage(m.observable.accept_mask),
                                  b_rend.preimage(m.observable.reject_mask)),
        reject_mode=m.reject_mode, name=f"{m.name}-norend" if m.name else "")
    validate_machine(out).require()
    return out


# ------------------------------------------------------ inverse homomorphism

def apply_inverse_homomorphism(m: FiniteTopMachine, h: Mapping[str, str],
                               alphabet: tuple[str, ...] | None = None
                               ) -> FiniteTopMachine:
    """Machine for the inverse image of L(m) under the homomorphism h: each
    new symbol acts as the composed operator of its image word."""
    _require_deterministic(m, "inverse homomorphism")
    if not m.endmarked:
        raise EndmarkerMode("inverse homomorphism expects both endmarkers")
    validate_machine(m).require()
    gamma = set(m.alphabet)
    for sym, image in h.items():
        bad = [c for c in image if c not in gamma]
        if bad:
            raise ConstructionError(
                f"h({sym!r}) = {image!r} uses symbols outside the alphabet")
    alphabet = tuple(alphabet) if alphabet is not None else tuple(sorted(h))
    n = m.topology.n_points
    ops: dict[str, Op] = {
        sym: compose_chain([m.ops[c] for c in h[sym]], n) for sym in alphabet}
    ops[LEND] = m.ops[LEND]
    ops[REND] = m.ops[REND]
    out = FiniteTopMachine(
        alphabet=alphabet, topology=m.topology, ops=ops,
        initial=m.initial, observable=m.observable,
        name=f"{m.name}-invhom" if m.name else "")
    validate_machine(out).require()
    return out


# ----------------------------------------------------------- boolean closure

def complement_machine(m):
    """Swap accept and reject; Undetermined words are unchanged."""
    if isinstance(m, LazyTopMachine):
        swap = {Verdict.ACCEPT: Verdict.REJECT, Verdict.REJECT: Verdict.ACCEPT,
                Verdict.UNDETERMINED: Verdict.UNDETERMINED}
        inner = m.classify
        return LazyTopMachine(
            alphabet=m.alphabet, endmarked=m.endmarked, init=m.init,
            step=m.step, classify=lambda c: swap[inner(c)],
            deterministic=m.deterministic, reject_mode=m.reject_mode,
            render=m.render, invariant=m.invariant,
            name=f"{m.name}-complement" if m.name else "")
    validate_machine(m).require()
    out = FiniteTopMachine(
        alphabet=m.alphabet, topology=m.topology, ops=dict(m.ops),
        initial=m.initial,
        observable=ObservablePair(m.observable.reject_mask,
                                  m.observable.accept_mask),
        reject_mode=m.reject_mode,
        name=f"{m.name}-complement" if m.name else "")
    validate_machine(out).require()
    return out


def product_machine(m1: FiniteTopMachine, m2: FiniteTopMachine,
                    mode: str = "union") -> FiniteTopMachine:
    """Pairwise product machine; union mode accepts when either factor
    accepts and rejects when both do, intersection mode swaps the roles."""
    if mode not in ("union", "intersection"):
        raise ValueError(f"unknown product mode {mode!r}")
    _require_deterministic(m1, "the product construction")
    _require_deterministic(m2, "the product construction")
    if sorted(m1.alphabet) != sorted(m2.alphabet):
        raise ConstructionError("product factors must share the alphabet")
    if set(m1.ops) != set(m2.ops):
        raise ConstructionError("product factors must share the endmarker mode")
    validate_machine(m1).require()
    validate_machine(m2).require()
    t = product_topology(m1.topology, m2.topology)
    n1, n2 = m1.topology.n_points, m2.topology.n_points
    ops = {}
    for sym in m1.ops:
        op1, op2 = m1.ops[sym], m2.ops[sym]
        table = [op1(i) * n2 + op2(j) for i in range(n1) for j in range(n2)]
        ops[sym] = SingleOp(n1 * n2, tuple(table))

    def lift_pair(mask1: int, mask2: int) -> int:
        out = 0
        for i in iter_bits(mask1):
            for j in iter_bits(mask2):
                out |= 1 << (i * n2 + j)
        return out

    full1, full2 = m1.topology.full, m2.topology.full
    a1, r1 = m1.observable.accept_mask, m1.observable.reject_mask
    a2, r2 = m2.observable.accept_mask, m2.observable.reject_mask
    if mode == "union":
        acc = lift_pair(full1, a2) | lift_pair(a1, full2)
        rej = lift_pair(r1, r2)
    else:
        acc = lift_pair(a1, a2)
        rej = lift_pair(full1, r2) | lift_pair(r1, full2)
    out = FiniteTopMachine(
        alphabet=m1.alphabet, topology=t, ops=ops,
        initial=m1.initial * n2 + m2.initial,
        observable=ObservablePair(acc, rej),
        name=f"{mode}-product")
    validate_machine(out).require()
    return out


# ------------------------------------------------------------ normalization

def normalize_machine(m: FiniteTopMachine) -> FiniteTopMachine:
    """Restrict a markless machine to the points reachable from the initial
    configuration (with the subspace topology); the result is slim and
    recognizes the same language."""
    if not m.markless:
        raise EndmarkerMode("normalization is defined for markless machines")
    validate_machine(m).require()
    reach = reachable_mask(m)
    sub, index = subspace_topology(m.topology, reach)
    ops = {sym: restrict_operator(op, reach, index) for sym, op in m.ops.items()}

    def compress(mask: int) -> int:
        out = 0
        for p in iter_bits(mask & reach):
            out |= 1 << index[p]
        return out

    out = FiniteTopMachine(
        alphabet=m.alphabet, topology=sub, ops=ops,
        initial=index[m.initial],
        observable=ObservablePair(compress(m.observable.accept_mask),
                                  compress(m.observable.reject_mask)),
        reject_mode=m.reject_mode,
        name=f"{m.name}-norm" if m.name else "")
    validate_machine(out).require()
    return out


# ----------------------------------------------------------------- reversal

def reverse_nta(m: FiniteTopMachine,
                anchors: tuple[int, int] | None = None) -> FiniteTopMachine:
    """Machine for the reversal of the recognized language: runs the inverted
    operators from a fixed accepting configuration back towards {v0}.

    Preconditions: both endmarkers, {v0} and its complement open, nonempty
    observables.  The output rejects by missing the accept set ("disjoint"
    mode), which is the vacuous-rejection reading the inverted dynamics need
    when a branch dies out.
    """
    if not m.endmarked:
        raise EndmarkerMode("reversal expects both endmarkers")
    validate_machine(m).require()
    t = m.topology
    v0_mask = 1 << m.initial
    if not (t.is_open(v0_mask) and t.is_open(t.full & ~v0_mask)):
        raise PreconditionTopology(
            "{v0} and its complement must both be open for reversal")
    acc, rej = m.observable.accept_mask, m.observable.reject_mask
    if acc == 0 or rej == 0:
        raise EmptyObservable("reversal needs nonempty accept and reject sets")
    if anchors is None:
        v_acc = (acc & -acc).bit_length() - 1
        v_rej = (rej & -rej).bit_length() - 1
    else:
        v_acc, v_rej = anchors
    collapse = make_D_operator(t.n_points, acc, rej, v_acc, v_rej, t)
    ops: dict[str, Op] = {}
    ops[LEND] = invert_multi(_as_multi(compose(collapse, m.ops[REND])))
    ops[REND] = invert_multi(_as_multi(m.ops[LEND]))
    for sym in m.alphabet:
        ops[sym] = invert_multi(_as_multi(m.ops[sym]))
    out = FiniteTopMachine(
        alphabet=m.alphabet, topology=t, ops=ops,
        initial=v_acc,
        observable=ObservablePair(v0_mask, t.full & ~v0_mask),
        reject_mode="disjoint",
        name=f"{m.name}-reversal" if m.name else "reversal")
    validate_machine(out).require()
    return out

"""Random topologies, operators, and machines.

Used by the test suite and the kernel benchmark.  Generation is rejection
based with continuity-safe fallbacks (constant maps are continuous on any
space), so every helper terminates on every topology.
"""

from __future__ import annotations

import random

from .machine import LEND, REND, FiniteTopMachine, ObservablePair
from .operators import MultiOp, Op, SingleOp, check_continuity, map_mask
from .topology import FiniteTopology, full_mask, iter_bits, mask_of


def random_topology(n: int, rng: random.Random, density: float = 0.3
                    ) -> FiniteTopology:
    """Random preorder: sprinkle edges, take the reflexive-transitive
    closure, read the rows as minimal neighborhoods."""
    rows = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                rows[i] |= 1 << j
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = rows[i]
            for j in iter_bits(rows[i]):
                acc |= rows[j]
            if acc != rows[i]:
                rows[i] = acc
                changed = True
    return FiniteTopology(n, tuple(rows))


def random_continuous_single(t: FiniteTopology, rng: random.Random,
                             attempts: int = 200) -> SingleOp:
    n = t.n_points
    for _ in range(attempts):
        op = SingleOp(n, tuple(rng.randrange(n) for _ in range(n)))
        if check_continuity(t, op):
            return op
    return SingleOp(n, (rng.randrange(n),) * n)  # constant map fallback


def random_continuous_multi(t: FiniteTopology, rng: random.Random,
                            total: bool = True, attempts: int = 200
                            ) -> MultiOp:
    n = t.n_points
    full = full_mask(n)
    for _ in range(attempts):
        table = []
        for _ in range(n):
            mask = rng.randrange(1 << n)
            if total and mask == 0:
                mask = 1 << rng.randrange(n)
            table.append(mask)
        op = MultiOp(n, tuple(table))
        if check_continuity(t, op):
            return op
    return MultiOp(n, (full,) * n)  # constant full-set fallback


def random_homeo_permutation(t: FiniteTopology, rng: random.Random,
                             attempts: int = 100) -> SingleOp:
    """A permutation continuous in both directions (an automorphism of the
    space); falls back to the identity when none is sampled."""
    n = t.n_points
    points = list(range(n))
    for _ in range(attempts):
        rng.shuffle(points)
        op = SingleOp(n, tuple(points))
        if check_continuity(t, op) and check_continuity(t, op.inverse()):
            return op
    return SingleOp.identity(n)


def random_observable(t: FiniteTopology, rng: random.Random,
                      nonempty: bool = False,
                      partition: bool = False) -> ObservablePair | None:
    """A random disjoint clopen pair, or None when the space offers none of
    the requested kind."""
    clopen = t.clopen_sets()
    if partition:
        full = t.full
        options = [c for c in clopen if (not nonempty) or (c and c != full)]
        if not options:
            return None
        a = rng.choice(options)
        return ObservablePair(a, full & ~a)
    pairs = [(a, b) for a in clopen for b in clopen
             if a & b == 0 and (not nonempty or (a and b))]
    if not pairs:
        return None
    return ObservablePair(*rng.choice(pairs))


def random_dta(n: int, alphabet: tuple[str, ...], rng: random.Random,
               endmarked: bool = True, permutation_lend: bool = False,
               observable: ObservablePair | None = None,
               topology: FiniteTopology | None = None) -> FiniteTopMachine:
    t = topology if topology is not None else random_topology(n, rng)
    ops: dict[str, Op] = {s: random_continuous_single(t, rng) for s in alphabet}
    if endmarked:
        ops[LEND] = (random_homeo_permutation(t, rng) if permutation_lend
                     else random_continuous_single(t, rng))
        ops[REND] = random_continuous_single(t, rng)
    if observable is None:
        observable = random_observable(t, rng)
    return FiniteTopMachine(alphabet=alphabet, topology=t, ops=ops,
                            initial=rng.randrange(n), observable=observable)


def random_nta(n: int, alphabet: tuple[str, ...], rng: random.Random,
               endmarked: bool = True, total: bool = True,
               open_initial: bool = False,
               partition_observable: bool = False,
               topology: FiniteTopology | None = None
               ) -> FiniteTopMachine | None:
    """Random nondeterministic machine; None when the sampled topology
    cannot satisfy the requested preconditions."""
    t = topology if topology is not None else random_topology(n, rng)
    ops: dict[str, Op] = {s: random_continuous_multi(t, rng, total)
                          for s in alphabet}
    if endmarked:
        ops[LEND] = random_continuous_multi(t, rng, total)
        ops[REND] = random_continuous_multi(t, rng, total)
    if open_initial:
        candidates = [x for x in range(n) if t.mins[x] == 1 << x]
        if not candidates:
            return None
        initial = rng.choice(candidates)
    else:
        initial = rng.randrange(n)
    observable = random_observable(t, rng, nonempty=partition_observable,
                                   partition=partition_observable)
    if observable is None:
        return None
    return FiniteTopMachine(alphabet=alphabet, topology=t, ops=ops,
                            initial=initial, observable=observable)


def relabel_machine(m: FiniteTopMachine, perm: SingleOp) -> FiniteTopMachine:
    """Point-relabeled copy (homeomorphic to the input via perm)."""
    n = m.topology.n_points
    inv = perm.inverse()
    mins = [0] * n
    for x in range(n):
        mins[perm(x)] = map_mask(perm, m.topology.mins[x])
    t = FiniteTopology(n, tuple(mins))
    ops: dict[str, Op] = {}
    for sym, op in m.ops.items():
        if isinstance(op, SingleOp):
            ops[sym] = SingleOp(n, tuple(perm(op(inv(v))) for v in range(n)))
        else:
            ops[sym] = MultiOp(n, tuple(map_mask(perm, op(inv(v)))
                                        for v in range(n)))
    return FiniteTopMachine(
        alphabet=m.alphabet, topology=t, ops=ops,
        initial=perm(m.initial),
        observable=ObservablePair(map_mask(perm, m.observable.accept_mask),
                                  map_mask(perm, m.observable.reject_mask)),
        reject_mode=m.reject_mode,
        name=f"{m.name}-relabeled" if m.name else "")


def random_permutation(n: int, rng: random.Random) -> SingleOp:
    points = list(range(n))
    rng.shuffle(points)
    return SingleOp(n, tuple(points))


def add_unreachable_points(m: FiniteTopMachine, extra: int,
                           rng: random.Random) -> FiniteTopMachine:
    """Pad a markless machine with isolated extra points no operator maps
    into; the padded machine is language-equivalent but not slim."""
    n = m.topology.n_points
    total = n + extra
    mins = list(m.topology.mins) + [1 << (n + i) for i in range(extra)]
    t = FiniteTopology(total, tuple(mins))
    ops: dict[str, Op] = {}
    for sym, op in m.ops.items():
        if isinstance(op, SingleOp):
            table = list(op.table) + [rng.randrange(total) for _ in range(extra)]
            ops[sym] = SingleOp(total, tuple(table))
        else:
            table = list(op.table) + [mask_of([rng.randrange(total)])
                                      for _ in range(extra)]
            ops[sym] = MultiOp(total, tuple(table))
    return FiniteTopMachine(
        alphabet=m.alphabet, topology=t, ops=ops, initial=m.initial,
        observable=m.observable, reject_mode=m.reject_mode,
        name=f"{m.name}-padded" if m.name else "")

"""Independent oracles: bounded language equivalence, automata-base axioms,
distinguishability bounds, and the small-topology classification table.

The equivalence oracle compares full three-valued verdicts word by word in
the canonical order (shortest first, lexicographic within a length), so a
counterexample is always the shortest-lex witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import MachineError
from .machine import (
    DEFAULT_WORD_BUDGET,
    Machine,
    Verdict,
    verdict_from_code,
    verdict_vector,
    word_at_index,
)
from .operators import MonoidClosure, SingleOp, compose, generated_monoid
from .topology import (
    FiniteTopology,
    enumerate_topologies,
    indistinguishability_partition,
    is_kolmogorov,
)


# ------------------------------------------------------------- equivalence

@dataclass
class CompareResult:
    equivalent: bool
    counterexample: str | None = None
    verdicts: tuple[Verdict, Verdict] | None = None

    def __bool__(self):
        return self.equivalent


def brute_force_compare(m1: Machine, m2: Machine, max_len: int,
                        mode: str = "three_valued",
                        budget: int = DEFAULT_WORD_BUDGET) -> CompareResult:
    """Compare verdicts on every word of length <= max_len.

    mode "three_valued" requires Accept/Reject/Undetermined to all agree;
    "accepted_only" compares just the accepted sets (for classical automata
    without an undetermined region).
    """
    if sorted(m1.alphabet) != sorted(m2.alphabet):
        raise MachineError("machines compare over different alphabets")
    v1 = verdict_vector(m1, max_len, budget)
    v2 = verdict_vector(m2, max_len, budget)
    if mode == "accepted_only":
        v1 = (v1 == Verdict.ACCEPT.code)
        v2 = (v2 == Verdict.ACCEPT.code)
    elif mode != "three_valued":
        raise ValueError(f"unknown comparison mode {mode!r}")
    diff = np.nonzero(v1 != v2)[0]
    if diff.size == 0:
        return CompareResult(True)
    i = int(diff[0])
    word = word_at_index(m1.alphabet, i)
    if mode == "accepted_only":
        pair = (Verdict.ACCEPT if v1[i] else Verdict.REJECT,
                Verdict.ACCEPT if v2[i] else Verdict.REJECT)
    else:
        pair = (verdict_from_code(v1[i]), verdict_from_code(v2[i]))
    return CompareResult(False, word, pair)


# ------------------------------------------------------------- base axioms

@dataclass
class BaseAxiomReport:
    monoid: MonoidClosure
    identity_ok: bool
    left_act_ok: bool
    associativity_ok: bool
    violations: list[str]

    @property
    def ok(self) -> bool:
        return (self.identity_ok and self.left_act_ok and self.associativity_ok
                and self.monoid.closed)


def verify_base_axioms(ops: list[SingleOp], cap: int | None = None,
                       triple_samples: int = 200,
                       seed: int = 0) -> BaseAxiomReport:
    """Build the generated operator monoid and check the left-act laws:
    identity acts trivially, (A.B) applied to v equals A applied to B(v)
    (exhaustive over the monoid and the points), and composition is
    associative on sampled triples."""
    closure = generated_monoid(ops, cap)
    elements = closure.elements
    n = elements[0].n_points
    violations: list[str] = []

    ident = SingleOp.identity(n)
    identity_ok = all(ident(v) == v for v in range(n))
    if not identity_ok:
        violations.append("identity law fails")

    left_act_ok = True
    for a in elements:
        for b in elements:
            ab = compose(a, b)
            if any(ab(v) != a(b(v)) for v in range(n)):
                left_act_ok = False
                violations.append(f"left act fails for {a.table} . {b.table}")
                break
        if not left_act_ok:
            break

    rng = random.Random(seed)
    associativity_ok = True
    for _ in range(triple_samples):
        a, b, c = (rng.choice(elements) for _ in range(3))
        if compose(compose(a, b), c) != compose(a, compose(b, c)):
            associativity_ok = False
            violations.append("associativity fails on a sampled triple")
            break

    if not closure.closed:
        violations.append("monoid closure incomplete under the cap")
    return BaseAxiomReport(closure, identity_ok, left_act_ok,
                           associativity_ok, violations)


# ------------------------------------------------------- structural bounds

def distinguishability_bound(t: FiniteTopology) -> int:
    """Number of indistinguishability classes; bounds the quotient DFA."""
    return len(indistinguishability_partition(t))


@dataclass
class TopologyRow:
    index: int
    topology: FiniteTopology
    opens_count: int
    class_count: int
    kolmogorov: bool
    is_trivial: bool
    is_discrete: bool
    observable_pairs: int


def count_observable_pairs(t: FiniteTopology) -> int:
    """Ordered pairs of disjoint clopen sets (valid observables)."""
    clopen = t.clopen_sets()
    return sum(1 for a in clopen for b in clopen if a & b == 0)


def classify_small_topologies(n: int) -> list[TopologyRow]:
    """Structural table of every topology on n <= 4 points."""
    if n > 4:
        raise MachineError("classification table supports n <= 4")
    rows = []
    for i, t in enumerate(enumerate_topologies(n)):
        opens = t.opens
        classes = len(indistinguishability_partition(t))
        rows.append(TopologyRow(
            index=i,
            topology=t,
            opens_count=len(opens),
            class_count=classes,
            kolmogorov=is_kolmogorov(t),
            is_trivial=len(opens) == 2 if n > 1 else True,
            is_discrete=len(opens) == 1 << n,
            observable_pairs=count_observable_pairs(t),
        ))
    return rows

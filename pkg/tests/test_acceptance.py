"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with  pytest tests/test_acceptance.py -v -s  to see the lines inline.
Randomized criteria use fixed seeds; timed criteria measure steady-state
behaviour (kernels are compiled by the warm_kernels fixture first).
"""

import random
import time
from itertools import product as iproduct

import numpy as np
import pytest

from topomata.constructions import (
    apply_inverse_homomorphism,
    complement_machine,
    eliminate_left_endmarker,
    eliminate_right_endmarker,
    normalize_machine,
    product_machine,
    quotient_to_dfa,
    reverse_nta,
    vietoris_determinize,
)
from topomata.errors import TopomataError
from topomata.machine import (
    LEND,
    REND,
    FiniteTopMachine,
    ObservablePair,
    Verdict,
    enumerate_language,
    is_slim,
    iter_words,
    machines_homeomorphic,
    run_word,
    validate_machine,
    verdict_vector,
)
from topomata.operators import MultiOp, SingleOp, check_continuity, invert_multi
from topomata.randgen import (
    add_unreachable_points,
    random_dta,
    random_nta,
    random_permutation,
    relabel_machine,
)
from topomata.topology import (
    discrete_topology,
    enumerate_topologies,
    full_mask,
    hyper_inside,
    hyper_meeting,
    is_kolmogorov,
    pts,
    trivial_topology,
    vietoris_space,
)
from topomata.verify import brute_force_compare, distinguishability_bound
from topomata.zoo import (
    NfaTable,
    QuantumSpec,
    StochasticSpec,
    classical_import,
    equal_machine,
    language_machine,
    make_mm_qfa,
    make_mo_qfa,
    make_pfa,
    make_superop_qfa,
    zero_machine,
)

pytestmark = pytest.mark.usefixtures("warm_kernels")


def report(num: int, name: str, ok: bool, detail: str = ""):
    line = f"criterion {num:02d} ({name}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


# --------------------------------------------------------------------- 1

def test_criterion_01_zero_machine():
    z = zero_machine()
    t0 = time.perf_counter()
    lang = enumerate_language(z, 10)
    elapsed = time.perf_counter() - t0
    expected = {"0" * k for k in range(11)}
    ok = (set(lang.accepted) == expected
          and len(lang.accepted) + len(lang.rejected) == 2**11 - 1
          and not lang.undetermined
          and not is_kolmogorov(z.topology)
          and elapsed < 1.0)
    report(1, "zero machine", ok, f"{elapsed:.3f}s over 2047 words")


# --------------------------------------------------------------------- 2

def test_criterion_02_equal_counter():
    eq = equal_machine()
    t0 = time.perf_counter()
    lang = enumerate_language(eq, 12)
    elapsed = time.perf_counter() - t0
    expected = {w for w in iter_words(("a", "b"), 12)
                if w.count("a") == w.count("b")}
    ok = (set(lang.accepted) == expected and not lang.undetermined
          and elapsed < 5.0)
    report(2, "equal counter", ok, f"{elapsed:.3f}s over 8191 words")


# --------------------------------------------------------------------- 3

def test_criterion_03_quotient_to_dfa():
    rng = random.Random(303)
    machines = [zero_machine()]
    while len(machines) < 51:
        machines.append(random_dta(rng.randrange(1, 6), ("a", "b"), rng))
    ok = True
    for m in machines:
        dfa = quotient_to_dfa(m)
        if not brute_force_compare(dfa.to_machine(), m, 8).equivalent:
            ok = False
            break
        if dfa.n_states > distinguishability_bound(m.topology):
            ok = False
            break
    report(3, "quotient to dfa", ok, f"{len(machines)} machines")


# --------------------------------------------------------------------- 4

def sigma_star_a_nfa() -> FiniteTopMachine:
    table = NfaTable(
        2, ("a", "b"),
        {"a": (frozenset({0, 1}), frozenset()),
         "b": (frozenset({0}), frozenset()),
         LEND: (frozenset({0}), frozenset({1})),
         REND: (frozenset({0}), frozenset({1}))},
        0, frozenset({1}), frozenset({0}))
    return classical_import(table)


def test_criterion_04_vietoris_determinization():
    rng = random.Random(404)
    machines = [sigma_star_a_nfa()]
    attempts = 0
    while len(machines) < 26 and attempts < 2000:
        attempts += 1
        m = random_nta(rng.randrange(1, 5), ("a", "b"), rng, total=True,
                       open_initial=True)
        if m is None:
            continue
        try:
            vietoris_determinize(m, "explicit")
        except TopomataError:
            continue
        machines.append(m)
    ok = len(machines) == 26
    for m in machines:
        explicit = vietoris_determinize(m, "explicit")
        subset = vietoris_determinize(m, "subset_semantics")
        if not (brute_force_compare(m, explicit, 8).equivalent
                and brute_force_compare(m, subset, 8).equivalent):
            ok = False
            break
        hyper = vietoris_space(m.topology, "all_nonempty_subsets")
        acc = hyper_meeting(hyper, m.observable.accept_mask)
        rej = hyper_inside(hyper, m.observable.reject_mask)
        if not (hyper.topology.is_clopen(acc)
                and hyper.topology.is_clopen(rej)
                and explicit.observable == ObservablePair(acc, rej)):
            ok = False
            break
        if not all(check_continuity(explicit.topology, op)
                   for op in explicit.ops.values()):
            ok = False
            break
    report(4, "vietoris determinization", ok,
           f"{len(machines)} machines incl. the trailing-a nfa")


# --------------------------------------------------------------------- 5

def test_criterion_05_endmarker_elimination():
    rng = random.Random(505)
    ok = True
    lend_machines = []
    while len(lend_machines) < 25:
        n = rng.randrange(1, 6)
        topo = discrete_topology(n) if rng.random() < 0.5 else None
        lend_machines.append(
            random_dta(n, ("a", "b"), rng, permutation_lend=True,
                       topology=topo))
    for m in lend_machines:
        out = eliminate_left_endmarker(m)
        if out.has_lend or not brute_force_compare(m, out, 8).equivalent:
            ok = False
            break
    rend_machines = [random_dta(rng.randrange(1, 6), ("a", "b"), rng)
                     for _ in range(25)]
    for m in rend_machines:
        out = eliminate_right_endmarker(m)
        if out.has_rend or not brute_force_compare(m, out, 8).equivalent:
            ok = False
            break
    report(5, "endmarker elimination", ok, "25 strip-lend + 25 strip-rend")


# --------------------------------------------------------------------- 6

def test_criterion_06_boolean_closures():
    rng = random.Random(606)
    ok = True
    swap = {Verdict.ACCEPT.code: Verdict.REJECT.code,
            Verdict.REJECT.code: Verdict.ACCEPT.code,
            Verdict.UNDETERMINED.code: Verdict.UNDETERMINED.code}
    for _ in range(10):
        m = random_dta(rng.randrange(1, 5), ("a", "b"), rng)
        comp = complement_machine(m)
        v = verdict_vector(m, 8)
        vc = verdict_vector(comp, 8)
        if not all(swap[int(a)] == int(b) for a, b in zip(v, vc)):
            ok = False
            break
    for _ in range(10):
        m1 = random_dta(rng.randrange(1, 4), ("a", "b"), rng)
        m2 = random_dta(rng.randrange(1, 4), ("a", "b"), rng)
        uni = product_machine(m1, m2, "union")
        inter = product_machine(m1, m2, "intersection")
        l1, l2 = enumerate_language(m1, 8), enumerate_language(m2, 8)
        lu, li = enumerate_language(uni, 8), enumerate_language(inter, 8)
        if not (set(lu.accepted) == set(l1.accepted) | set(l2.accepted)
                and set(lu.rejected) == set(l1.rejected) & set(l2.rejected)
                and set(li.accepted) == set(l1.accepted) & set(l2.accepted)
                and set(li.rejected) == set(l1.rejected) | set(l2.rejected)):
            ok = False
            break
    gamma = ("a", "b")
    for _ in range(10):
        m = random_dta(rng.randrange(1, 5), gamma, rng)
        h = {s: "".join(rng.choice(gamma)
                        for _ in range(rng.randrange(0, 3)))
             for s in ("x", "y", "z")}
        out = apply_inverse_homomorphism(m, h, ("x", "y", "z"))
        accepted_m = set(enumerate_language(m, 12).accepted)
        lang = set(enumerate_language(out, 6).accepted)
        expect = {w for w in iter_words(("x", "y", "z"), 6)
                  if "".join(h[c] for c in w) in accepted_m}
        if lang != expect:
            ok = False
            break
    report(6, "boolean closures", ok,
           "10 complements, 10 products, 10 inverse homomorphisms")


# --------------------------------------------------------------------- 7

def test_criterion_07_normalization():
    rng = random.Random(707)
    ok = True
    for _ in range(25):
        base = random_dta(rng.randrange(1, 4), ("a", "b"), rng,
                          endmarked=False)
        padded = add_unreachable_points(base, rng.randrange(1, 4), rng)
        out = normalize_machine(padded)
        if not (is_slim(out).slim
                and brute_force_compare(padded, out, 8).equivalent):
            ok = False
            break
    report(7, "normalization", ok, "25 padded markless machines")


# --------------------------------------------------------------------- 8

def test_criterion_08_reversal():
    rng = random.Random(808)
    ok = True
    done = 0
    while done < 10:
        n = rng.randrange(2, 5)
        m = random_nta(n, ("a", "b"), rng, total=True,
                       partition_observable=True,
                       topology=discrete_topology(n))
        if m is None:
            continue
        rev = reverse_nta(m)
        lang = enumerate_language(m, 6)
        rlang = enumerate_language(rev, 6)
        if set(rlang.accepted) != {w[::-1] for w in lang.accepted}:
            ok = False
            break
        if set(rlang.rejected) != {w[::-1] for w in lang.rejected}:
            ok = False
            break
        done += 1
    report(8, "reversal", ok, f"{done} discrete total machines")


# --------------------------------------------------------------------- 9

def test_criterion_09_inverse_operator_laws():
    ok = True
    counterexample_seen = False
    for n in (1, 2, 3):
        full = full_mask(n)
        for images in iproduct(range(full + 1), repeat=n):
            b = MultiOp(n, images)
            inv = invert_multi(b)
            fwd_total = sum(1 << v for v in range(n) if b.table[v])
            back_total = sum(1 << v for v in range(n) if inv.table[v])
            for a1 in range(full + 1):
                for a2 in range(full + 1):
                    # (2) meeting transfers through the inverse
                    if a1 & inv.image(a2) and not b.image(a1) & a2:
                        ok = False
                    # (3) monotonicity
                    if a1 & ~a2 == 0:
                        if b.image(a1) & ~b.image(a2):
                            ok = False
                        if inv.image(a1) & ~inv.image(a2):
                            ok = False
            for a in range(1, full + 1):
                # (1) under pointwise-nonempty images
                if a & ~fwd_total == 0 and a & ~inv.image(b.image(a)):
                    ok = False
                if a & ~back_total == 0 and a & ~b.image(inv.image(a)):
                    ok = False
                # the literal statement breaks on dead points
                if b.image(a) == 0 and a:
                    counterexample_seen = True
    # the documented counterexample, explicitly
    dead = MultiOp(1, (0,))
    counterexample_holds = invert_multi(dead).image(dead.image(pts(0))) == 0
    ok = ok and counterexample_seen and counterexample_holds
    report(9, "inverse operator laws", ok,
           "exhaustive over all multi-ops, n <= 3")


# -------------------------------------------------------------------- 10

def _random_unitary(k, nprng):
    z = nprng.normal(size=(k, k)) + 1j * nprng.normal(size=(k, k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_kraus_pair(k, nprng):
    z = nprng.normal(size=(2 * k, k)) + 1j * nprng.normal(size=(2 * k, k))
    q, _ = np.linalg.qr(z)
    return [q[:k, :], q[k:, :]]


def _random_stochastic(k, nprng):
    m = nprng.random(size=(k, k)) + 1e-3
    return (m / m.sum(axis=0)).tolist()


def test_criterion_10_numeric_invariants():
    nprng = np.random.default_rng(1010)
    rng = random.Random(1010)
    k = 3
    machines = []
    pfa_spec = StochasticSpec(
        ("a", "b"), k,
        {"a": _random_stochastic(k, nprng), "b": _random_stochastic(k, nprng)},
        0.2, (0,), (1,))
    machines.append(make_pfa(pfa_spec))
    mo_spec = QuantumSpec(("a", "b"), k, 0.2, (0,), (1,),
                          matrices={"a": _random_unitary(k, nprng),
                                    "b": _random_unitary(k, nprng)})
    machines.append(make_mo_qfa(mo_spec))
    mm_spec = QuantumSpec(("a", "b"), k, 0.2, (0,), (1,),
                          matrices={"a": _random_unitary(k, nprng),
                                    "b": _random_unitary(k, nprng)})
    machines.append(make_mm_qfa(mm_spec))
    so_spec = QuantumSpec(("a", "b"), k, 0.2, (0,), (1,),
                          kraus={"a": _random_kraus_pair(k, nprng),
                                 "b": _random_kraus_pair(k, nprng)})
    machines.append(make_superop_qfa(so_spec))
    ok = True
    runs = 0
    try:
        for m in machines:
            for _ in range(25):
                word = "".join(rng.choice("ab")
                               for _ in range(rng.randrange(13)))
                run_word(m, word)  # invariant hooks assert at every step
                runs += 1
    except TopomataError:
        ok = False
    ok = ok and runs == 100
    report(10, "numeric invariants", ok, f"{runs} runs across 4 families")


# -------------------------------------------------------------------- 11

def brute_force_topology_count(n: int) -> int:
    from itertools import combinations
    full = full_mask(n)
    count = 0
    middle = list(range(1, full))
    for r in range(len(middle) + 1):
        for chosen in combinations(middle, r):
            fam = set(chosen) | {0, full}
            if all((a | b) in fam and (a & b) in fam
                   for a in fam for b in fam):
                count += 1
    return count


def test_criterion_11_topology_combinatorics():
    t0 = time.perf_counter()
    counts = [sum(1 for _ in enumerate_topologies(n)) for n in (1, 2, 3, 4)]
    elapsed = time.perf_counter() - t0
    cross = [brute_force_topology_count(n) for n in (1, 2, 3)]
    ok = (counts == [1, 4, 29, 355] and cross == [1, 4, 29]
          and elapsed < 10.0)
    report(11, "topology combinatorics", ok,
           f"counts={counts} in {elapsed:.3f}s")


# -------------------------------------------------------------------- 12

def test_criterion_12_trivial_and_language_machines():
    rng = random.Random(1212)
    ok = True
    for _ in range(10):
        n = rng.randrange(1, 5)
        t = trivial_topology(n)
        obs = rng.choice([(t.full, 0), (0, t.full), (0, 0)])
        ops = {s: SingleOp(n, tuple(rng.randrange(n) for _ in range(n)))
               for s in ("a", "b")}
        m = FiniteTopMachine(("a", "b"), t, ops, rng.randrange(n),
                             ObservablePair(*obs))
        if not validate_machine(m).ok:
            ok = False
            break
        if len(set(verdict_vector(m, 8).tolist())) != 1:
            ok = False
            break
    predicates = [
        ("contains-1", ("0", "1"), lambda w: "1" in w),
        ("palindrome", ("a", "b"), lambda w: w == w[::-1]),
        ("even-length", ("a", "b"), lambda w: len(w) % 2 == 0),
        ("balanced-ab", ("a", "b"), lambda w: w.count("a") == w.count("b")),
        ("never", ("a", "b"), lambda w: False),
    ]
    for name, alpha, pred in predicates:
        for endmarked in (True, False):
            m = language_machine(pred, alpha, endmarked)
            lang = enumerate_language(m, 8)
            expect = {w for w in iter_words(alpha, 8) if pred(w)}
            if set(lang.accepted) != expect or lang.undetermined:
                ok = False
    report(12, "trivial spaces and language machines", ok,
           "10 trivial machines, 5 predicates x 2 marker modes")


# -------------------------------------------------------------------- 13

def test_criterion_13_homeomorphism():
    rng = random.Random(1313)
    ok = True
    for _ in range(25):
        m = random_dta(rng.randrange(2, 6), ("a", "b"), rng)
        perm = random_permutation(m.topology.n_points, rng)
        other = relabel_machine(m, perm)
        if not machines_homeomorphic(m, other, perm):
            ok = False
            break
        if not brute_force_compare(m, other, 8).equivalent:
            ok = False
            break
    report(13, "homeomorphic machines", ok, "25 relabeled machines")

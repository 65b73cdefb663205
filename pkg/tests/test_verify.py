import pytest

from topomata.constructions import complement_machine, quotient_to_dfa
from topomata.errors import MachineError
from topomata.machine import Verdict
from topomata.operators import SingleOp
from topomata.randgen import random_dta
from topomata.topology import (
    discrete_topology,
    trivial_topology,
    pts,
    validate_topology,
)
from topomata.verify import (
    brute_force_compare,
    classify_small_topologies,
    distinguishability_bound,
    verify_base_axioms,
)
from topomata.zoo import ones_machine

ZERO_FAMILY = [pts(), pts(0), pts(1, 2), pts(0, 1, 2)]


class TestBruteForceCompare:
    def test_reflexive(self, zero):
        assert brute_force_compare(zero, zero, 8).equivalent

    def test_symmetric(self, zero):
        ones = ones_machine()
        a = brute_force_compare(zero, ones, 6)
        b = brute_force_compare(ones, zero, 6)
        assert a.counterexample == b.counterexample == "0"

    def test_complement_counterexample_is_shortest_lex(self, zero):
        result = brute_force_compare(zero, complement_machine(zero), 8)
        assert not result.equivalent
        assert result.counterexample == ""
        assert result.verdicts == (Verdict.ACCEPT, Verdict.REJECT)

    def test_oracle_vs_quotient(self, zero):
        dfa = quotient_to_dfa(zero)
        assert brute_force_compare(dfa.to_machine(), zero, 8).equivalent

    def test_accepted_only_mode(self, zero, rng):
        # a machine that swaps Reject and Undetermined still matches on
        # accepted words
        from topomata.machine import FiniteTopMachine, ObservablePair
        loose = FiniteTopMachine(zero.alphabet, zero.topology, zero.ops, 0,
                                 ObservablePair(pts(0), 0))
        assert not brute_force_compare(zero, loose, 6).equivalent
        assert brute_force_compare(zero, loose, 6,
                                   mode="accepted_only").equivalent

    def test_alphabet_mismatch(self, zero, rng):
        other = random_dta(2, ("a", "b"), rng)
        with pytest.raises(MachineError):
            brute_force_compare(zero, other, 4)


class TestBaseAxioms:
    def test_identity_only(self):
        report = verify_base_axioms([SingleOp.identity(3)])
        assert report.ok and len(report.monoid.elements) == 1

    def test_zero_generators(self, zero):
        report = verify_base_axioms([zero.ops["0"], zero.ops["1"]])
        assert report.ok
        assert len(report.monoid.elements) == 3

    def test_random_ops_laws_hold(self, rng):
        ops = [SingleOp(3, tuple(rng.randrange(3) for _ in range(3)))
               for _ in range(2)]
        assert verify_base_axioms(ops).ok

    def test_cap_is_reported(self):
        cyc = SingleOp(5, (1, 2, 3, 4, 0))
        report = verify_base_axioms([cyc], cap=2)
        assert not report.ok
        assert any("closure" in v for v in report.violations)


class TestBounds:
    def test_zero_bound(self):
        assert distinguishability_bound(validate_topology(3, ZERO_FAMILY)) == 2

    def test_trivial_discrete(self):
        assert distinguishability_bound(trivial_topology(5)) == 1
        assert distinguishability_bound(discrete_topology(5)) == 5

    def test_bounds_quotient_states(self, rng):
        for _ in range(10):
            m = random_dta(rng.randrange(1, 6), ("a", "b"), rng)
            assert (quotient_to_dfa(m).n_states
                    <= distinguishability_bound(m.topology)
                    <= m.topology.n_points)


class TestClassifyTable:
    def test_n2_table(self):
        rows = classify_small_topologies(2)
        assert len(rows) == 4
        trivial_rows = [r for r in rows if r.is_trivial]
        assert len(trivial_rows) == 1
        r = trivial_rows[0]
        assert r.class_count == 1 and not r.kolmogorov
        # observables on the trivial space: (0,0), (0,V), (V,0)
        assert r.observable_pairs == 3

    def test_n3_has_29_rows(self):
        assert len(classify_small_topologies(3)) == 29

    def test_discrete_rows(self):
        for n in (1, 2, 3, 4):
            rows = [r for r in classify_small_topologies(n) if r.is_discrete]
            assert len(rows) == 1
            assert rows[0].kolmogorov and rows[0].class_count == n
            # disjoint clopen pairs in the discrete space: 3^n
            assert rows[0].observable_pairs == 3**n

    def test_too_large(self):
        with pytest.raises(MachineError):
            classify_small_topologies(5)


class TestMergedFatesOnZero:
    def test_indistinguishable_points_share_fates(self, zero):
        # the two indistinguishable points of the zero machine are never
        # separated by any continuation's verdict
        from topomata.machine import iter_words, run_word
        from topomata.machine import FiniteTopMachine
        for cont in iter_words(("0", "1"), 6):
            z1 = FiniteTopMachine(zero.alphabet, zero.topology, zero.ops, 1,
                                  zero.observable)
            z2 = FiniteTopMachine(zero.alphabet, zero.topology, zero.ops, 2,
                                  zero.observable)
            assert run_word(z1, cont).verdict == run_word(z2, cont).verdict
import numpy as np
import pytest

from topomata.errors import MachineError
from topomata.machine import (
    LEND,
    REND,
    Dfa,
    Verdict,
    enumerate_language,
    iter_words,
    run_word,
    validate_machine,
)
from topomata.verify import brute_force_compare
from topomata.zoo import (
    NfaTable,
    PushdownSpec,
    QuantumSpec,
    StochasticSpec,
    builtin_examples,
    classical_import,
    dyck_machine,
    equal_machine,
    language_machine,
    make_gfa,
    make_mm_qfa,
    make_mo_qfa,
    make_pfa,
    make_pushdown,
    make_superop_qfa,
    mm_qfa_step,
    ones_machine,
    zero_machine,
)

IDENT2 = {"lend": (0, 1), "rend": (0, 1)}


def parity_dfa() -> Dfa:
    return Dfa(2, ("a",), {"a": (1, 0), **{k: tuple(v) for k, v in IDENT2.items()}},
               0, frozenset({0}), frozenset({1}))


class TestClassicalImport:
    def test_always_accepting(self):
        dfa = Dfa(1, ("a",), {"a": (0,), "lend": (0,), "rend": (0,)},
                  0, frozenset({0}), frozenset())
        m = classical_import(dfa)
        assert not enumerate_language(m, 8).rejected

    def test_parity(self):
        m = classical_import(parity_dfa())
        lang = enumerate_language(m, 8)
        assert set(lang.accepted) == {"a" * k for k in range(0, 9, 2)}

    def test_nfa_matches_subset_determinization(self):
        from topomata.constructions import vietoris_determinize
        table = NfaTable(
            2, ("a", "b"),
            {"a": (frozenset({0, 1}), frozenset()),
             "b": (frozenset({0}), frozenset()),
             LEND: (frozenset({0}), frozenset({1})),
             REND: (frozenset({0}), frozenset({1}))},
            0, frozenset({1}), frozenset({0}))
        m = classical_import(table)
        assert brute_force_compare(
            m, vietoris_determinize(m, "subset_semantics"), 8).equivalent

    def test_imports_validate(self):
        assert validate_machine(classical_import(parity_dfa())).ok


class TestLanguageMachine:
    def test_contains_one(self):
        m = language_machine(lambda w: "1" in w, ("0", "1"), endmarked=True)
        lang = enumerate_language(m, 8)
        assert set(lang.accepted) == {w for w in iter_words(("0", "1"), 8)
                                      if "1" in w}
        assert not lang.undetermined

    def test_palindromes(self):
        m = language_machine(lambda w: w == w[::-1], ("a", "b"),
                             endmarked=False)
        lang = enumerate_language(m, 8)
        assert set(lang.accepted) == {w for w in iter_words(("a", "b"), 8)
                                      if w == w[::-1]}

    def test_constant_false(self):
        m = language_machine(lambda w: False, ("a",), endmarked=True)
        assert not enumerate_language(m, 6).accepted


class TestPfa:
    def test_one_state_accepts_everything(self):
        spec = StochasticSpec(("a",), 1, {"a": [[1.0]]}, 0.0, (0,), ())
        m = make_pfa(spec)
        assert not enumerate_language(m, 6).rejected

    def test_permutation_matrices_emulate_parity(self):
        swap = [[0.0, 1.0], [1.0, 0.0]]
        eye = [[1.0, 0.0], [0.0, 1.0]]
        spec = StochasticSpec(("a",), 2, {"a": swap, LEND: eye, REND: eye},
                              0.0, (0,), (1,))
        m = make_pfa(spec)
        assert brute_force_compare(m, classical_import(parity_dfa()), 8).equivalent

    def test_mixing_matrix_leaves_undetermined_words(self):
        mix = [[0.5, 0.5], [0.5, 0.5]]
        spec = StochasticSpec(("a",), 2, {"a": mix}, 0.4, (0,), (1,))
        m = make_pfa(spec)
        # after one step the mass is (0.5, 0.5): neither side reaches 0.6
        assert run_word(m, "a").verdict is Verdict.UNDETERMINED
        assert run_word(m, "").verdict is Verdict.ACCEPT

    def test_exact_rational_mode(self):
        mix = [["1/2", "1/2"], ["1/2", "1/2"]]
        spec = StochasticSpec(("a",), 2, {"a": mix}, "2/5", (0,), (1,),
                              exact=True)
        m = make_pfa(spec)
        assert run_word(m, "a").verdict is Verdict.UNDETERMINED
        assert run_word(m, "aa").verdict is Verdict.UNDETERMINED

    def test_non_stochastic_rejected(self):
        with pytest.raises(MachineError):
            StochasticSpec(("a",), 2, {"a": [[0.5, 0.5], [0.4, 0.5]]},
                           0.0, (0,), (1,))

    def test_vectors_stay_stochastic(self, rng):
        mats = {}
        for sym in ("a", "b"):
            cols = []
            for _ in range(3):
                x = [rng.random() for _ in range(3)]
                s = sum(x)
                cols.append([v / s for v in x])
            mats[sym] = np.array(cols).T.tolist()
        spec = StochasticSpec(("a", "b"), 3, mats, 0.1, (0,), (1,))
        m = make_pfa(spec)
        for _ in range(20):
            word = "".join(rng.choice("ab") for _ in range(rng.randrange(12)))
            run_word(m, word)  # the invariant hook checks every step


class TestGfa:
    def test_subspace_membership(self):
        proj = [[1.0, 0.0], [0.0, 0.0]]  # crush onto coordinate 0
        m = make_gfa(("a",), {"a": proj}, accept_ix=(0,), reject_ix=(1,))
        assert run_word(m, "a").verdict is Verdict.ACCEPT

    def test_reject_side(self):
        shift = [[0.0, 0.0], [1.0, 0.0]]
        m = make_gfa(("a",), {"a": shift}, accept_ix=(0,), reject_ix=(1,))
        assert run_word(m, "a").verdict is Verdict.REJECT

    def test_zero_vector_undetermined(self):
        kill = [[0.0, 0.0], [0.0, 0.0]]
        m = make_gfa(("a",), {"a": kill}, accept_ix=(0,), reject_ix=(1,))
        assert run_word(m, "a").verdict is Verdict.UNDETERMINED


def hadamard():
    h = 1 / np.sqrt(2)
    return [[h, h], [h, -h]]


class TestQfa:
    def test_mo_norm_conserved(self, rng):
        spec = QuantumSpec(("a",), 2, 0.2, (0,), (1,),
                           matrices={"a": hadamard()})
        m = make_mo_qfa(spec)
        for k in range(12):
            run_word(m, "a" * k)  # invariant hook asserts unit norm

    def test_mo_accepts_rotated_basis(self):
        spec = QuantumSpec(("a",), 2, 0.0, (0,), (1,),
                           matrices={"a": [[0, 1], [1, 0]]})
        m = make_mo_qfa(spec)
        assert run_word(m, "a").verdict is Verdict.REJECT
        assert run_word(m, "aa").verdict is Verdict.ACCEPT

    def test_mm_single_step_full_projection(self):
        spec = QuantumSpec(("a",), 1, 0.0, (0,), (),
                           matrices={"a": [[1.0]]})
        config = (np.array([1.0 + 0j]), 0.0, 0.0)
        v, g1, g2 = mm_qfa_step(spec, config, "a")
        assert g1 == pytest.approx(1.0)
        assert g2 == 0.0
        assert np.linalg.norm(v) == pytest.approx(0.0)

    def test_mm_mass_conservation(self, rng):
        spec = QuantumSpec(("a", "b"), 3, 0.2, (0,), (1,),
                           matrices={"a": np.eye(3)[[1, 2, 0]],
                                     "b": np.eye(3)[[2, 0, 1]]})
        m = make_mm_qfa(spec)
        for _ in range(20):
            word = "".join(rng.choice("ab") for _ in range(rng.randrange(12)))
            result = run_word(m, word)
            v, g1, g2 = result.final
            total = g1 * g1 + g2 * g2 + float(np.linalg.norm(v) ** 2)
            assert abs(total - 1.0) < 1e-9

    def test_mm_accepts_when_mass_lands(self):
        spec = QuantumSpec(("a",), 2, 0.0, (0,), (1,),
                           matrices={"a": np.eye(2)})
        m = make_mm_qfa(spec)
        # the very first measurement sees all mass on the accept coordinate
        assert run_word(m, "a").verdict is Verdict.ACCEPT
        flip = QuantumSpec(("a",), 2, 0.0, (0,), (1,),
                           matrices={"a": [[0, 1], [1, 0]]})
        assert run_word(make_mm_qfa(flip), "a").verdict is Verdict.REJECT

    def test_superop_trace_preserved(self, rng):
        # an amplitude-damping channel mixed with a unitary
        gamma = 0.3
        k0 = [[1, 0], [0, np.sqrt(1 - gamma)]]
        k1 = [[0, np.sqrt(gamma)], [0, 0]]
        spec = QuantumSpec(("a",), 2, 0.1, (0,), (1,),
                           kraus={"a": [k0, k1]})
        m = make_superop_qfa(spec)
        for k in range(10):
            run_word(m, "a" * k)  # invariant hook asserts trace/psd

    def test_superop_classifies_by_trace(self):
        flip = [[0, 1], [1, 0]]
        spec = QuantumSpec(("a",), 2, 0.0, (0,), (1,), kraus={"a": [flip]})
        m = make_superop_qfa(spec)
        assert run_word(m, "a").verdict is Verdict.REJECT
        assert run_word(m, "aa").verdict is Verdict.ACCEPT

    def test_non_unitary_rejected(self):
        with pytest.raises(MachineError):
            QuantumSpec(("a",), 2, 0.1, (0,), (1,),
                        matrices={"a": [[1, 0], [1, 1]]})

    def test_kraus_completeness_enforced(self):
        with pytest.raises(MachineError):
            QuantumSpec(("a",), 2, 0.1, (0,), (1,),
                        kraus={"a": [[[1, 0], [0, 0.5]]]})


class TestPushdown:
    def test_dyck_hand_simulation(self):
        m = dyck_machine()
        assert run_word(m, "(())").verdict is Verdict.ACCEPT
        assert run_word(m, "(()").verdict is Verdict.REJECT
        assert run_word(m, "())").verdict is Verdict.REJECT
        assert run_word(m, "").verdict is Verdict.ACCEPT
        # step-by-step stack trace for "(())"
        stacks = [c[1] for _, c in run_word(m, "(())").trace]
        assert stacks == ["Z", "Z", "ZA", "ZAA", "ZA", "Z", "Z"]

    def test_dyck_language(self):
        m = dyck_machine()

        def balanced(w):
            depth = 0
            for c in w:
                depth += 1 if c == "(" else -1
                if depth < 0:
                    return False
            return depth == 0

        lang = enumerate_language(m, 8)
        expect = {w for w in iter_words(("(", ")"), 8) if balanced(w)}
        assert set(lang.accepted) == expect

    def test_stack_ignoring_dpda_equals_dfa(self):
        # write back the top symbol: the stack never changes
        moves = {}
        flip = {0: 1, 1: 0}
        for sym in ("a", LEND, REND):
            table = {}
            for q in (0, 1):
                for z in ("X", "Z"):
                    keep = "" if z == "Z" else z
                    nq = flip[q] if sym == "a" else q
                    table[(q, z)] = ((nq, keep),)
            moves[sym] = table
        spec = PushdownSpec(("a",), 2, ("X",), moves,
                            frozenset({0}), frozenset({1}))
        m = make_pushdown(spec)
        assert brute_force_compare(m, classical_import(parity_dfa()), 8).equivalent

    def test_single_state_always_accepts(self):
        moves = {sym: {(0, z): ((0, ""),) for z in ("Z",)}
                 for sym in ("a", LEND, REND)}
        spec = PushdownSpec(("a",), 1, (), moves, frozenset({0}), frozenset())
        m = make_pushdown(spec)
        assert not enumerate_language(m, 6).rejected

    def test_nondeterministic_pushdown(self):
        # guess a or b on each symbol; accepts if some branch ends in state 1
        moves = {
            "a": {(0, "Z"): ((0, ""), (1, "")), (1, "Z"): ((1, ""),)},
            LEND: {(0, "Z"): ((0, ""),), (1, "Z"): ((1, ""),)},
            REND: {(0, "Z"): ((0, ""),), (1, "Z"): ((1, ""),)},
        }
        spec = PushdownSpec(("a",), 2, (), moves, frozenset({1}),
                            frozenset({0}))
        m = make_pushdown(spec, deterministic=False)
        assert run_word(m, "a").verdict is Verdict.ACCEPT
        assert run_word(m, "").verdict is Verdict.REJECT


class TestBuiltins:
    def test_zero_language(self):
        lang = enumerate_language(zero_machine(), 8)
        assert set(lang.accepted) == {"0" * k for k in range(9)}
        assert all("1" in w for w in lang.rejected)
        assert not lang.undetermined

    def test_equal_language(self):
        lang = enumerate_language(equal_machine(), 10)
        assert set(lang.accepted) == {
            w for w in iter_words(("a", "b"), 10)
            if w.count("a") == w.count("b")}

    def test_equal_trace(self):
        trace = [c for _, c in run_word(equal_machine(), "ab").trace]
        assert trace == [0, 0, 1, 0, 0]

    def test_ones_language(self):
        lang = enumerate_language(ones_machine(), 6)
        assert set(lang.accepted) == {"1" * k for k in range(7)}

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin_examples("nope")

    def test_equal_is_not_regular_at_bound_five(self):
        # Nerode-style witness: the prefixes a^0..a^5 are pairwise
        # distinguished by suffixes from b^0..b^5
        eq = equal_machine()
        prefixes = ["a" * i for i in range(6)]
        for i, p in enumerate(prefixes):
            for q in prefixes[i + 1:]:
                assert any(
                    run_word(eq, p + "b" * j).verdict
                    != run_word(eq, q + "b" * j).verdict
                    for j in range(6))

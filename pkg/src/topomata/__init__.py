"""One-way topological automata over finite topologies.

Machines evolve a configuration through one continuous operator per input
symbol and are observed once at the end against a clopen accept/reject pair.
The package provides the machine model (deterministic and nondeterministic,
finite and lazy), the classical encodings (DFA/NFA, probabilistic, quantum,
pushdown), every construction between machines (quotient to DFA, Vietoris
determinization, endmarker elimination, Boolean closures, normalization,
reversal), and brute-force oracles that check each construction by bounded
language equivalence.
"""

from ._kernels import active_backend
from .constructions import (
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
from .machine import (
    LEND,
    REND,
    Dfa,
    FiniteTopMachine,
    LazyTopMachine,
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
from .operators import (
    MultiOp,
    SingleOp,
    check_continuity,
    check_homeomorphism,
    compose,
    generated_monoid,
    invert_multi,
    lift_operator,
    make_D_operator,
    restrict_operator,
)
from .topology import (
    FiniteTopology,
    Hyperspace,
    PointPartition,
    canonical_topology,
    discrete_topology,
    enumerate_topologies,
    generate_from_basis,
    indistinguishability_partition,
    is_kolmogorov,
    lattice_compare,
    lattice_join,
    lattice_meet,
    mask_of,
    minimal_neighborhood,
    points_of,
    product_topology,
    pts,
    set_status,
    subspace_topology,
    trivial_topology,
    validate_topology,
    vietoris_space,
)
from .verify import (
    brute_force_compare,
    classify_small_topologies,
    distinguishability_bound,
    verify_base_axioms,
)
from .zoo import (
    NfaTable,
    PushdownSpec,
    QuantumSpec,
    StochasticSpec,
    builtin_examples,
    classical_import,
    equal_machine,
    language_machine,
    make_gfa,
    make_mm_qfa,
    make_mo_qfa,
    make_pfa,
    make_pushdown,
    make_superop_qfa,
    zero_machine,
)

__version__ = "0.1.0"

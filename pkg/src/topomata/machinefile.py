"""Machine file format: JSON documents describing machines.

Types: "finite-dta" / "finite-nta" (explicit topology + operator tables),
"dfa" (classical automaton), "zoo" (builtin machine by name, or an embedded
numeric spec for the probabilistic/quantum families).

Canonical serialization: sorted keys, two-space indent, sorted point lists,
sorted alphabet, trailing newline.  The "endmarked" field is true/false in
the common cases and "lend"/"rend" for half-stripped machines produced by
the endmarker eliminations.  Matrix entries are numbers, rationals "p/q",
or two-element [re, im] arrays for complex values.  Unknown fields are
rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InvalidMachine, ParseError, TopomataError
from .machine import (
    LEND,
    REND,
    Dfa,
    FiniteTopMachine,
    LazyTopMachine,
    ObservablePair,
)
from .operators import MultiOp, SingleOp
from .topology import mask_of, points_of, validate_topology
from .zoo import (
    BUILTIN_NAMES,
    QuantumSpec,
    StochasticSpec,
    builtin_examples,
    make_gfa,
    make_mm_qfa,
    make_mo_qfa,
    make_pfa,
    make_superop_qfa,
)

Machine = FiniteTopMachine | LazyTopMachine | Dfa


@dataclass
class MachineFile:
    doc: dict
    machine: Machine


# ----------------------------------------------------------------- helpers

def _fail(msg: str):
    raise ParseError(msg)


def _expect_keys(doc: dict, required: set[str], optional: set[str]):
    keys = set(doc)
    missing = required - keys
    if missing:
        _fail(f"missing fields: {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        _fail(f"unknown fields: {sorted(unknown)}")


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in value):
        _fail(f"{what} must be a list of integers")
    return value


def _alphabet(value) -> tuple[str, ...]:
    if (not isinstance(value, list) or not value
            or not all(isinstance(s, str) and len(s) == 1 for s in value)):
        _fail("alphabet must be a nonempty list of single-character strings")
    if len(set(value)) != len(value):
        _fail("alphabet has repeated symbols")
    return tuple(sorted(value))


def _marker_mode(value) -> tuple[bool, bool]:
    if value is True:
        return True, True
    if value is False:
        return False, False
    if value == "lend":
        return True, False
    if value == "rend":
        return False, True
    _fail('endmarked must be true, false, "lend" or "rend"')


def _op_keys(alphabet, has_lend, has_rend) -> list[str]:
    keys = list(alphabet)
    if has_lend:
        keys.append(LEND)
    if has_rend:
        keys.append(REND)
    return keys


def decode_number(x, exact: bool = False):
    """Decode a JSON scalar: number, rational "p/q", or [re, im] pair."""
    if isinstance(x, bool):
        _fail("booleans are not numbers")
    if isinstance(x, (int, float)):
        return Fraction(x) if exact else x
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except (ValueError, ZeroDivisionError):
            _fail(f"bad rational literal {x!r}")
        return f if exact else float(f)
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    _fail(f"bad numeric entry {x!r}")


def _matrix(rows, dim: int, exact: bool = False):
    if not isinstance(rows, list) or len(rows) != dim or any(
            not isinstance(r, list) or len(r) != dim for r in rows):
        _fail(f"matrices must be {dim}x{dim} row-major arrays")
    return [[decode_number(x, exact) for x in r] for r in rows]


# ------------------------------------------------------------------ parsing

def parse_text(text: str) -> MachineFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        _fail("machine file must be a JSON object")
    kind = doc.get("type")
    if kind in ("finite-dta", "finite-nta"):
        machine = _build_finite(doc, deterministic=(kind == "finite-dta"))
    elif kind == "dfa":
        machine = _build_dfa(doc)
    elif kind == "zoo":
        machine = _build_zoo(doc)
    else:
        _fail(f"unknown machine type {kind!r}")
    return MachineFile(doc, machine)


def load(path: str | Path) -> MachineFile:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def _semantic(stage: str, fn, *args):
    """Semantic construction failures are invalid-machine errors, not parse
    errors."""
    try:
        return fn(*args)
    except TopomataError as exc:
        if isinstance(exc, (ParseError, InvalidMachine)):
            raise
        raise InvalidMachine([f"{stage}: {exc}"]) from exc


def _build_finite(doc: dict, deterministic: bool) -> FiniteTopMachine:
    required = {"type", "points", "alphabet", "endmarked", "opens", "initial",
                "accept", "reject", "ops"}
    _expect_keys(doc, required, {"reject_mode", "name"})
    n = doc["points"]
    if not isinstance(n, int) or n < 1:
        _fail("points must be a positive integer")
    alphabet = _alphabet(doc["alphabet"])
    has_lend, has_rend = _marker_mode(doc["endmarked"])
    if not isinstance(doc["opens"], list):
        _fail("opens must be a list of point lists")
    opens = [mask_of(_int_list(o, "an open set")) for o in doc["opens"]]
    topology = _semantic("topology", validate_topology, n, opens)

    ops_doc = doc["ops"]
    if not isinstance(ops_doc, dict):
        _fail("ops must be an object keyed by symbols")
    keys = _op_keys(alphabet, has_lend, has_rend)
    if set(ops_doc) != set(keys):
        _fail(f"ops keys {sorted(ops_doc)} do not match expected {sorted(keys)}")
    ops = {}
    for sym in keys:
        row = ops_doc[sym]
        if deterministic:
            table = _int_list(row, f"ops[{sym!r}]")
            ops[sym] = _semantic(f"ops[{sym!r}]", SingleOp, n, tuple(table))
        else:
            if not isinstance(row, list):
                _fail(f"ops[{sym!r}] must be a list of point lists")
            masks = tuple(mask_of(_int_list(t, f"ops[{sym!r}]")) for t in row)
            ops[sym] = _semantic(f"ops[{sym!r}]", MultiOp, n, masks)

    observable = _semantic(
        "observable", ObservablePair,
        mask_of(_int_list(doc["accept"], "accept")),
        mask_of(_int_list(doc["reject"], "reject")))
    reject_mode = doc.get("reject_mode", "subset")
    if reject_mode not in ("subset", "disjoint"):
        _fail(f"bad reject_mode {reject_mode!r}")
    if not isinstance(doc["initial"], int):
        _fail("initial must be an integer")
    return _semantic("machine", FiniteTopMachine, alphabet, topology, ops,
                     doc["initial"], observable, reject_mode,
                     doc.get("name", ""))


def _build_dfa(doc: dict) -> Dfa:
    required = {"type", "points", "alphabet", "endmarked", "initial",
                "accept", "reject", "ops"}
    _expect_keys(doc, required, {"name"})
    n = doc["points"]
    if not isinstance(n, int) or n < 1:
        _fail("points must be a positive integer")
    alphabet = _alphabet(doc["alphabet"])
    has_lend, has_rend = _marker_mode(doc["endmarked"])
    keys = _op_keys(alphabet, has_lend, has_rend)
    ops_doc = doc["ops"]
    if not isinstance(ops_doc, dict) or set(ops_doc) != set(keys):
        _fail("ops keys do not match the alphabet and endmarker mode")
    transitions = {}
    for sym in keys:
        row = _int_list(ops_doc[sym], f"ops[{sym!r}]")
        if len(row) != n or any(not 0 <= q < n for q in row):
            raise InvalidMachine([f"transition row for {sym!r} is not total"])
        transitions[sym] = tuple(row)
    return _semantic("dfa", Dfa, n, alphabet, transitions, doc["initial"],
                     frozenset(_int_list(doc["accept"], "accept")),
                     frozenset(_int_list(doc["reject"], "reject")))


_ZOO_KINDS = ("pfa", "gfa", "mo-qfa", "mm-qfa", "superop-qfa")


def _build_zoo(doc: dict):
    if "name" in doc:
        _expect_keys(doc, {"type", "name"}, set())
        if doc["name"] not in BUILTIN_NAMES:
            _fail(f"unknown builtin machine {doc['name']!r}")
        return builtin_examples(doc["name"])
    kind = doc.get("kind")
    if kind not in _ZOO_KINDS:
        _fail(f"zoo files need a builtin name or a kind in {_ZOO_KINDS}")
    common = {"type", "kind", "alphabet", "dim", "accept", "reject"}
    optional = {"initial", "name"}
    extra_req = {"pfa": {"matrices", "epsilon"}, "gfa": {"matrices"},
                 "mo-qfa": {"matrices", "epsilon"},
                 "mm-qfa": {"matrices", "epsilon"},
                 "superop-qfa": {"kraus", "epsilon"}}[kind]
    extra_opt = {"pfa": {"exact"}, "gfa": {"tolerance"}}.get(kind, set())
    _expect_keys(doc, common | extra_req, optional | extra_opt)
    alphabet = _alphabet(doc["alphabet"])
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        _fail("dim must be a positive integer")
    accept = tuple(_int_list(doc["accept"], "accept"))
    reject = tuple(_int_list(doc["reject"], "reject"))

    def matrices_for(exact: bool = False):
        raw = doc.get("matrices")
        if not isinstance(raw, dict):
            _fail("matrices must be an object keyed by symbols")
        allowed = set(_op_keys(alphabet, True, True))
        if not set(raw) <= allowed or not set(alphabet) <= set(raw):
            _fail("matrices must cover the alphabet (plus optional markers)")
        return {sym: _matrix(rows, dim, exact) for sym, rows in raw.items()}

    initial = None
    if "initial" in doc:
        initial = [decode_number(x, doc.get("exact", False))
                   for x in doc["initial"]]

    if kind == "pfa":
        exact = bool(doc.get("exact", False))
        eps = decode_number(doc["epsilon"], exact)
        spec = _semantic("pfa spec", StochasticSpec, alphabet, dim,
                         matrices_for(exact), eps, accept, reject, initial,
                         exact)
        return make_pfa(spec)
    if kind == "gfa":
        tol = doc.get("tolerance", 1e-9)
        return _semantic("gfa", make_gfa, alphabet, matrices_for(), accept,
                         reject, float(tol), initial)
    if kind == "superop-qfa":
        raw = doc["kraus"]
        if not isinstance(raw, dict):
            _fail("kraus must be an object keyed by symbols")
        kraus = {sym: [_matrix(a, dim) for a in fams]
                 for sym, fams in raw.items()}
        spec = _semantic("qfa spec", QuantumSpec, alphabet, dim,
                         float(doc["epsilon"]), accept, reject, None, kraus,
                         initial)
        return make_superop_qfa(spec)
    # mo-qfa / mm-qfa
    spec = _semantic("qfa spec", QuantumSpec, alphabet, dim,
                     float(doc["epsilon"]), accept, reject, matrices_for(),
                     None, initial)
    return make_mo_qfa(spec) if kind == "mo-qfa" else make_mm_qfa(spec)


# ------------------------------------------------------------ serialization

def canonical_text(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _endmarked_field(has_lend: bool, has_rend: bool):
    if has_lend and has_rend:
        return True
    if not has_lend and not has_rend:
        return False
    return "lend" if has_lend else "rend"


def machine_to_doc(m: Machine) -> dict:
    """Canonical document for a serializable machine (finite machines and
    classical DFAs; lazy machines keep their original spec documents)."""
    if isinstance(m, Dfa):
        has_lend, has_rend = LEND in m.transitions, REND in m.transitions
        return {
            "type": "dfa",
            "points": m.n_states,
            "alphabet": sorted(m.alphabet),
            "endmarked": _endmarked_field(has_lend, has_rend),
            "initial": m.start,
            "accept": sorted(m.accept_states),
            "reject": sorted(m.reject_states),
            "ops": {sym: list(row) for sym, row in m.transitions.items()},
        }
    if not isinstance(m, FiniteTopMachine):
        raise InvalidMachine(["lazy machines cannot be serialized; "
                              "keep their spec files"])
    doc = {
        "type": "finite-dta" if m.deterministic else "finite-nta",
        "points": m.topology.n_points,
        "alphabet": sorted(m.alphabet),
        "endmarked": _endmarked_field(m.has_lend, m.has_rend),
        "opens": sorted(sorted(points_of(o)) for o in m.topology.opens),
        "initial": m.initial,
        "accept": sorted(points_of(m.observable.accept_mask)),
        "reject": sorted(points_of(m.observable.reject_mask)),
    }
    if m.deterministic:
        doc["ops"] = {sym: list(op.table) for sym, op in m.ops.items()}
    else:
        doc["ops"] = {sym: [sorted(points_of(t)) for t in op.table]
                      for sym, op in m.ops.items()}
        doc["reject_mode"] = m.reject_mode
    return doc


def dump(machine_or_doc, path: str | Path) -> None:
    doc = (machine_or_doc if isinstance(machine_or_doc, dict)
           else machine_to_doc(machine_or_doc))
    Path(path).write_text(canonical_text(doc), encoding="utf-8")

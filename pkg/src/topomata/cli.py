"""Command-line front end.

Exit codes: 0 accept/equivalent/ok, 1 reject/counterexample, 2 undetermined,
3 invalid machine (including failed construction preconditions), 4 parse or
usage error.  Output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import constructions, verify
from .errors import InvalidMachine, ParseError, TopomataError, UnknownSymbol
from .machine import (
    Dfa,
    FiniteTopMachine,
    LazyTopMachine,
    Verdict,
    run_word,
    validate_machine,
)
from .machinefile import MachineFile, canonical_text, load, machine_to_doc
from .topology import enumerate_topologies, points_of

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_UNDETERMINED = 2
EXIT_INVALID = 3
EXIT_PARSE = 4

_VERDICT_EXIT = {Verdict.ACCEPT: EXIT_ACCEPT, Verdict.REJECT: EXIT_REJECT,
                 Verdict.UNDETERMINED: EXIT_UNDETERMINED}


def _runnable(mf: MachineFile):
    m = mf.machine
    if isinstance(m, Dfa):
        m = m.to_machine()
    report = validate_machine(m)
    report.require()
    return m


def _render_config(machine, config) -> str:
    if isinstance(machine, LazyTopMachine):
        return machine.render(config)
    if isinstance(machine, FiniteTopMachine) and not machine.deterministic:
        return "{" + ",".join(map(str, points_of(config))) + "}"
    return str(config)


# --------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    try:
        mf = load(args.file)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidMachine as exc:
        for v in exc.violations:
            print(f"INVALID: {v}")
        return EXIT_INVALID
    m = mf.machine.to_machine() if isinstance(mf.machine, Dfa) else mf.machine
    report = validate_machine(m)
    if report.ok:
        print("VALID")
        return 0
    for v in report.violations:
        print(f"INVALID: {v}")
    return EXIT_INVALID


def cmd_run(args) -> int:
    mf = load(args.file)
    machine = _runnable(mf)
    try:
        result = run_word(machine, args.word)
    except UnknownSymbol as exc:
        raise ParseError(str(exc)) from exc
    if args.trace:
        for i, (sym, config) in enumerate(result.trace):
            print(f"{i}\t{sym}\t{_render_config(machine, config)}")
    print(result.verdict.name)
    return _VERDICT_EXIT[result.verdict]


def _apply_op(machine, op_spec: str):
    name, _, arg = op_spec.partition(":")
    if name == "quotient-dfa":
        return constructions.quotient_to_dfa(machine)
    if name == "determinize":
        mode = {"": "explicit", "explicit": "explicit",
                "subset": "subset_semantics"}.get(arg)
        if mode is None:
            raise ParseError(f"unknown determinize mode {arg!r}")
        return constructions.vietoris_determinize(machine, mode)
    if name == "strip-lend":
        return constructions.eliminate_left_endmarker(machine)
    if name == "strip-rend":
        return constructions.eliminate_right_endmarker(machine)
    if name == "complement":
        return constructions.complement_machine(machine)
    if name == "normalize":
        return constructions.normalize_machine(machine)
    if name == "reverse":
        return constructions.reverse_nta(machine)
    if name == "invhom":
        if not arg:
            raise ParseError("invhom needs a map file: --op invhom:MAPFILE")
        try:
            hdoc = json.loads(Path(arg).read_text(encoding="utf-8"))
            alphabet = tuple(hdoc["alphabet"])
            hmap = dict(hdoc["map"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad homomorphism file {arg!r}: {exc}") from exc
        return constructions.apply_inverse_homomorphism(machine, hmap, alphabet)
    if name == "product":
        file2, _, mode = arg.partition(":")
        if not file2 or mode not in ("union", "intersection"):
            raise ParseError(
                "product needs --op product:FILE2:union|intersection")
        other = _runnable(load(file2))
        if not isinstance(other, FiniteTopMachine):
            raise InvalidMachine(["product factors must be finite machines"])
        return constructions.product_machine(machine, other, mode)
    raise ParseError(f"unknown conversion op {op_spec!r}")


def cmd_convert(args) -> int:
    mf = load(args.file)
    machine = _runnable(mf)
    if not isinstance(machine, FiniteTopMachine):
        raise InvalidMachine(["conversions need a finite machine input"])
    out = _apply_op(machine, args.op)
    text = canonical_text(machine_to_doc(out))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_compare(args) -> int:
    from .machine import iter_words, verdict_from_code, verdict_vector

    m1 = _runnable(load(args.file1))
    m2 = _runnable(load(args.file2))
    if args.dump:
        v1 = verdict_vector(m1, args.max_len)
        v2 = verdict_vector(m2, args.max_len)
        for word, a, b in zip(iter_words(m1.alphabet, args.max_len), v1, v2):
            print(f"{word}\t{verdict_from_code(a).name}"
                  f"\t{verdict_from_code(b).name}")
    mode = "accepted_only" if args.accepted_only else "three_valued"
    result = verify.brute_force_compare(m1, m2, args.max_len, mode)
    if result.equivalent:
        print("EQUIVALENT")
        return 0
    v1, v2 = result.verdicts
    print(f"COUNTEREXAMPLE {result.counterexample!r}: "
          f"{v1.name} vs {v2.name}")
    return 1


def cmd_topologies(args) -> int:
    if args.classify:
        rows = verify.classify_small_topologies(args.n)
        print(f"{len(rows)} topologies on {args.n} points")
        for r in rows:
            opens = sorted(sorted(points_of(o)) for o in r.topology.opens)
            print(f"#{r.index} opens={r.opens_count} classes={r.class_count} "
                  f"kolmogorov={'yes' if r.kolmogorov else 'no'} "
                  f"trivial={'yes' if r.is_trivial else 'no'} "
                  f"discrete={'yes' if r.is_discrete else 'no'} "
                  f"observables={r.observable_pairs} "
                  f"family={opens}")
        return 0
    count = sum(1 for _ in enumerate_topologies(args.n))
    print(f"{count} topologies on {args.n} points")
    return 0


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="topomata",
        description="Topological automata: validate, run, convert, compare.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a machine file")
    v.add_argument("file")
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("run", help="run one word")
    r.add_argument("file")
    r.add_argument("--word", required=True,
                   help="input word (may be empty: --word '')")
    r.add_argument("--trace", action="store_true",
                   help="print one line per step")
    r.set_defaults(fn=cmd_run)

    c = sub.add_parser("convert", help="apply a construction")
    c.add_argument("file")
    c.add_argument("--op", required=True,
                   help="quotient-dfa | determinize[:explicit|:subset] | "
                        "strip-lend | strip-rend | complement | normalize | "
                        "reverse | invhom:MAPFILE | "
                        "product:FILE2:union|intersection")
    c.add_argument("--out", help="output file (default: stdout)")
    c.set_defaults(fn=cmd_convert)

    q = sub.add_parser("compare", help="bounded language equivalence")
    q.add_argument("file1")
    q.add_argument("file2")
    q.add_argument("--max-len", type=int, default=8)
    q.add_argument("--accepted-only", action="store_true",
                   help="compare accepted sets instead of full verdicts")
    q.add_argument("--dump", action="store_true",
                   help="print one word-verdict-verdict row per word first")
    q.set_defaults(fn=cmd_compare)

    t = sub.add_parser("topologies", help="enumerate/classify topologies")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--classify", action="store_true")
    t.set_defaults(fn=cmd_topologies)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidMachine as exc:
        for violation in exc.violations:
            print(f"INVALID: {violation}", file=sys.stderr)
        return EXIT_INVALID
    except TopomataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

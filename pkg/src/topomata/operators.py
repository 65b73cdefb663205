"""Single- and multi-valued transition operators on finite spaces.

A SingleOp is a total map on points, a MultiOp maps each point to a (possibly
empty) set of points.  Continuity is decided through minimal neighborhoods,
which on a finite (hence Alexandrov) space is exactly the textbook
neighborhood condition with the quantifiers eliminated:

    single-valued:  B(m(x)) inside m(B(x))        for every x
    multi-valued:   B(m(x)) inside union of m(y) over y in B(x)

Empty images are legal for multi-valued operators; the union on the right is
then empty, so a point with an empty image forces its whole minimal
neighborhood to have empty images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import (
    EmptyImage,
    ImageOutsideCarrier,
    NotClosed,
    NotInvertible,
    OperatorError,
    SizeMismatch,
)
from .topology import FiniteTopology, Hyperspace, full_mask, iter_bits


@dataclass(frozen=True)
class SingleOp:
    """Total map on points 0..n_points-1."""

    n_points: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.n_points:
            raise OperatorError("table length differs from point count")
        for v, w in enumerate(self.table):
            if not 0 <= w < self.n_points:
                raise OperatorError(f"image {w} of point {v} outside the space")

    @classmethod
    def identity(cls, n: int) -> "SingleOp":
        return cls(n, tuple(range(n)))

    def __call__(self, v: int) -> int:
        return self.table[v]

    def image(self, mask: int) -> int:
        out = 0
        for v in iter_bits(mask):
            out |= 1 << self.table[v]
        return out

    def preimage(self, mask: int) -> int:
        out = 0
        for v, w in enumerate(self.table):
            if (mask >> w) & 1:
                out |= 1 << v
        return out

    def is_bijection(self) -> bool:
        return len(set(self.table)) == self.n_points

    def inverse(self) -> "SingleOp":
        if not self.is_bijection():
            raise NotInvertible(f"operator {self.table} is not a bijection")
        inv = [0] * self.n_points
        for v, w in enumerate(self.table):
            inv[w] = v
        return SingleOp(self.n_points, tuple(inv))

    def as_multi(self) -> "MultiOp":
        return MultiOp(self.n_points, tuple(1 << w for w in self.table))


@dataclass(frozen=True)
class MultiOp:
    """Point-to-point-set map; image sets are masks and may be empty."""

    n_points: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.n_points:
            raise OperatorError("table length differs from point count")
        full = full_mask(self.n_points)
        for v, m in enumerate(self.table):
            if m & ~full:
                raise OperatorError(f"image of point {v} leaves the space")

    @classmethod
    def identity(cls, n: int) -> "MultiOp":
        return cls(n, tuple(1 << v for v in range(n)))

    def __call__(self, v: int) -> int:
        return self.table[v]

    def image(self, mask: int) -> int:
        out = 0
        for v in iter_bits(mask):
            out |= self.table[v]
        return out

    def as_single(self) -> SingleOp:
        tab = []
        for v, m in enumerate(self.table):
            if m == 0 or m & (m - 1):
                raise OperatorError(
                    f"image of point {v} is not a singleton; not single-valued")
            tab.append(m.bit_length() - 1)
        return SingleOp(self.n_points, tuple(tab))


Op = Union[SingleOp, MultiOp]


def _require_same_size(a: Op, b: Op):
    if a.n_points != b.n_points:
        raise SizeMismatch("operators act on different point counts")


# ------------------------------------------------------------- composition

def compose(a: Op, b: Op) -> Op:
    """a after b: (a . b)(v) = a(b(v)); multi-valued composition unions over
    the intermediate points."""
    _require_same_size(a, b)
    if isinstance(a, SingleOp) and isinstance(b, SingleOp):
        return SingleOp(a.n_points, tuple(a.table[w] for w in b.table))
    am = a.as_multi() if isinstance(a, SingleOp) else a
    bm = b.as_multi() if isinstance(b, SingleOp) else b
    return MultiOp(a.n_points, tuple(am.image(m) for m in bm.table))


def compose_chain(ops: Iterable[Op], n: int) -> Op:
    """Composition of a sequence applied left to right (first element acts
    first); empty sequence gives the identity."""
    result: Op = SingleOp.identity(n)
    for op in ops:
        result = compose(op, result)
    return result


def invert_multi(b: MultiOp) -> MultiOp:
    """Relational transpose: v in inverse(w) iff w in b(v)."""
    table = [0] * b.n_points
    for v, m in enumerate(b.table):
        for w in iter_bits(m):
            table[w] |= 1 << v
    return MultiOp(b.n_points, tuple(table))


# --------------------------------------------------------------- continuity

def continuity_witness(t: FiniteTopology, op: Op,
                       t_cod: FiniteTopology | None = None) -> int | None:
    """None when continuous, else a point where the neighborhood condition
    fails."""
    t_cod = t_cod or t
    if op.n_points != t.n_points or t_cod.n_points != t.n_points:
        raise SizeMismatch("operator and topology point counts differ")
    for x in range(t.n_points):
        if isinstance(op, SingleOp):
            target = t_cod.mins[op.table[x]]
        else:
            target = 0
            for y in iter_bits(op.table[x]):
                target |= t_cod.mins[y]
        if op.image(t.mins[x]) & ~target:
            return x
    return None


def check_continuity(t: FiniteTopology, op: Op,
                     t_cod: FiniteTopology | None = None) -> bool:
    return continuity_witness(t, op, t_cod) is None


# -------------------------------------------------------------- restriction

def restrict_operator(op: Op, s_mask: int, index: dict[int, int]) -> Op:
    """op restricted to a subset closed under it, renumbered through index."""
    for v in iter_bits(s_mask):
        img = op.table[v] if isinstance(op, MultiOp) else (1 << op.table[v])
        if img & ~s_mask:
            raise NotClosed(v, f"{img:#x}")
    n = len(index)
    if isinstance(op, SingleOp):
        tab = [0] * n
        for v in iter_bits(s_mask):
            tab[index[v]] = index[op.table[v]]
        return SingleOp(n, tuple(tab))
    tab = [0] * n
    for v in iter_bits(s_mask):
        m = 0
        for w in iter_bits(op.table[v]):
            m |= 1 << index[w]
        tab[index[v]] = m
    return MultiOp(n, tuple(tab))


# ------------------------------------------------------------------ lifting

def lift_operator(b: Op, hyper: Hyperspace, empty_image: str = "strict",
                  sink_mask: int | None = None) -> SingleOp:
    """Lift a multi-valued operator to the hyperspace: the lifted image of a
    carrier subset W is the union of b over the points of W.

    empty_image: "strict" raises EmptyImage when the union is empty; "sink"
    routes such subsets to the hyperpoint carrying sink_mask (default: the
    full base set, which every carrier contains).
    """
    bm = b.as_multi() if isinstance(b, SingleOp) else b
    if empty_image not in ("strict", "sink"):
        raise ValueError(f"unknown empty_image mode {empty_image!r}")
    sink_index = None
    if empty_image == "sink":
        sink = full_mask(bm.n_points) if sink_mask is None else sink_mask
        sink_index = hyper.index_of(sink)
        if sink_index is None:
            raise OperatorError(f"sink subset {sink:#x} is not a carrier point")
    table = []
    for hp in hyper.points:
        img = bm.image(hp.mask)
        if img == 0:
            if sink_index is None:
                raise EmptyImage(hp.mask)
            table.append(sink_index)
            continue
        idx = hyper.index_of(img)
        if idx is None:
            raise ImageOutsideCarrier(hp.mask, img)
        table.append(idx)
    return SingleOp(len(hyper.points), tuple(table))


# ----------------------------------------------------------- homeomorphism

def map_mask(f: SingleOp, mask: int) -> int:
    return f.image(mask)


def homeomorphism_failure(t1: FiniteTopology, t2: FiniteTopology,
                          f: SingleOp) -> str | None:
    """None when f is a homeomorphism t1 -> t2, else the failing condition."""
    if t1.n_points != t2.n_points or f.n_points != t1.n_points:
        return "point counts differ"
    if not f.is_bijection():
        return "not a bijection"
    if continuity_witness(t1, f, t2) is not None:
        return "forward map not continuous"
    if continuity_witness(t2, f.inverse(), t1) is not None:
        return "inverse map not continuous"
    return None


def check_homeomorphism(t1: FiniteTopology, t2: FiniteTopology,
                        f: SingleOp) -> bool:
    return homeomorphism_failure(t1, t2, f) is None


def ops_homeomorphic(b1: Op, b2: Op, f: SingleOp) -> bool:
    """b1(v) = w implies b2(f(v)) = f(w); for multi-valued operators the
    image sets must correspond under f."""
    if b1.n_points != b2.n_points or f.n_points != b1.n_points:
        return False
    if isinstance(b1, SingleOp) and isinstance(b2, SingleOp):
        return all(b2.table[f.table[v]] == f.table[b1.table[v]]
                   for v in range(b1.n_points))
    m1 = b1.as_multi() if isinstance(b1, SingleOp) else b1
    m2 = b2.as_multi() if isinstance(b2, SingleOp) else b2
    return all(m2.table[f.table[v]] == map_mask(f, m1.table[v])
               for v in range(m1.n_points))


def pairs_homeomorphic(pair1: tuple[int, int], pair2: tuple[int, int],
                       f: SingleOp) -> bool:
    """Set pairs correspond under f (f is assumed to be a homeomorphism of
    the hosting spaces, so matching images suffice)."""
    return (map_mask(f, pair1[0]) == pair2[0]
            and map_mask(f, pair1[1]) == pair2[1])


# ------------------------------------------------------------- D collapser

def make_D_operator(n: int, e_acc: int, e_rej: int, v_acc: int, v_rej: int,
                    t: FiniteTopology | None = None) -> SingleOp:
    """Collapse accepting points to v_acc and rejecting points to v_rej,
    fixing everything else.  When a hosting topology is supplied, continuity
    is asserted (it is guaranteed for clopen disjoint observables)."""
    if e_acc & e_rej:
        raise OperatorError("accept and reject sets overlap")
    if not (e_acc >> v_acc) & 1:
        raise OperatorError("accepting anchor outside the accept set")
    if not (e_rej >> v_rej) & 1:
        raise OperatorError("rejecting anchor outside the reject set")
    table = []
    for v in range(n):
        if (e_acc >> v) & 1:
            table.append(v_acc)
        elif (e_rej >> v) & 1:
            table.append(v_rej)
        else:
            table.append(v)
    op = SingleOp(n, tuple(table))
    if t is not None and not check_continuity(t, op):
        raise OperatorError("collapser is not continuous on the given space")
    return op


# ------------------------------------------------------------------ monoid

@dataclass(frozen=True)
class MonoidClosure:
    elements: tuple[SingleOp, ...]
    closed: bool


def generated_monoid(generators: Iterable[SingleOp],
                     cap: int | None = None) -> MonoidClosure:
    """Closure of {identity} + generators under composition, in breadth-first
    order, stopping (closed=False) once cap elements are exceeded.  The
    default cap n**n always suffices for single-valued operators."""
    gens = list(generators)
    if not gens:
        raise OperatorError("need at least one generator")
    n = gens[0].n_points
    for g in gens:
        if g.n_points != n:
            raise SizeMismatch("generators act on different point counts")
    if cap is None:
        cap = n**n
    elements: list[SingleOp] = [SingleOp.identity(n)]
    seen = {elements[0].table}
    for g in gens:
        if g.table not in seen:
            seen.add(g.table)
            elements.append(g)
    frontier = list(elements)
    while frontier:
        current = list(elements)
        nxt = []
        for a in frontier:
            for b in current:
                for c in (compose(a, b), compose(b, a)):
                    if c.table not in seen:
                        seen.add(c.table)
                        elements.append(c)
                        nxt.append(c)
                        if len(elements) > cap:
                            return MonoidClosure(tuple(elements), False)
        frontier = nxt
    return MonoidClosure(tuple(elements), True)

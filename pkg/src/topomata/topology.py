"""Explicit finite topological spaces.

Points are dense integers 0..n-1 and every point set is a bit mask (plain
Python int, so spaces larger than 64 points still work).  A finite topology
is stored canonically by its minimal-neighborhood table: m(x) is the
intersection of all opens containing x, which is itself open in any finite
space.  The full open-set family is recovered on demand as the family of all
down-closed masks; the two representations are interchangeable and equality
is decided on the table.

Minimal neighborhoods turn every quantified neighborhood condition
(continuity, interior, distinguishability) into a finite check, which is why
they drive all derived operations here and in `operators`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .errors import (
    BasisNotCovering,
    CapExceeded,
    MissingEmptyOrFull,
    NotABasis,
    NotClosedUnderIntersection,
    NotClosedUnderUnion,
    TopologyError,
)

# Materialising all opens scans 2**n masks; beyond this many points we refuse.
OPENS_SCAN_LIMIT = 20

# Hyperspace on all nonempty subsets has 2**n - 1 points.
DEFAULT_HYPERSPACE_CAP = 10


# ------------------------------------------------------------- mask helpers

def pts(*points: int) -> int:
    """Bit mask for an explicit list of points."""
    m = 0
    for p in points:
        m |= 1 << p
    return m


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points_of(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def full_mask(n: int) -> int:
    return (1 << n) - 1


# ------------------------------------------------------------------- types

@dataclass(frozen=True)
class FiniteTopology:
    """A topology on points 0..n_points-1, canonically described by the
    minimal neighborhood of each point."""

    n_points: int
    mins: tuple[int, ...]

    def __post_init__(self):
        if self.n_points < 1:
            raise TopologyError("a space needs at least one point")
        if len(self.mins) != self.n_points:
            raise TopologyError("minimal-neighborhood table has wrong length")
        full = full_mask(self.n_points)
        for x, m in enumerate(self.mins):
            if m & ~full:
                raise TopologyError(f"neighborhood of {x} leaves the space")
            if not (m >> x) & 1:
                raise TopologyError(f"minimal neighborhood of {x} misses {x}")
            for y in iter_bits(m):
                if self.mins[y] & ~m:
                    raise TopologyError(
                        f"not Alexandrov: {y} in m({x}) but m({y}) not in m({x})")

    @property
    def full(self) -> int:
        return full_mask(self.n_points)

    def min_neighborhood(self, x: int) -> int:
        return self.mins[x]

    def is_open(self, mask: int) -> bool:
        return all(self.mins[x] & ~mask == 0 for x in iter_bits(mask))

    def is_closed(self, mask: int) -> bool:
        return self.is_open(self.full & ~mask)

    def is_clopen(self, mask: int) -> bool:
        return self.is_open(mask) and self.is_closed(mask)

    @cached_property
    def opens(self) -> frozenset[int]:
        """The explicit open-set family (all down-closed masks)."""
        if self.n_points > OPENS_SCAN_LIMIT:
            raise CapExceeded(
                f"materialising opens of a {self.n_points}-point space "
                f"scans 2**{self.n_points} masks (limit {OPENS_SCAN_LIMIT})")
        flags = _kernels.open_flags(np.array(self.mins, dtype=np.int64))
        return frozenset(int(m) for m in np.nonzero(flags)[0])

    def clopen_sets(self) -> list[int]:
        full = self.full
        return sorted(m for m in self.opens if (full & ~m) in self.opens)

    def __repr__(self):
        return f"FiniteTopology(n_points={self.n_points}, mins={self.mins})"


def _mins_from_family(n: int, family: Iterable[int]) -> tuple[int, ...]:
    full = full_mask(n)
    mins = [full] * n
    for o in family:
        for x in range(n):
            if (o >> x) & 1:
                mins[x] &= o
    return tuple(mins)


def _from_opens(n: int, family: frozenset[int]) -> FiniteTopology:
    t = FiniteTopology(n, _mins_from_family(n, family))
    t.__dict__["opens"] = family  # already known, skip the scan
    return t


@dataclass(frozen=True)
class PointPartition:
    """Disjoint nonempty classes covering 0..n_points-1, as masks."""

    n_points: int
    classes: tuple[int, ...]

    def __post_init__(self):
        seen = 0
        for c in self.classes:
            if c == 0:
                raise TopologyError("empty partition class")
            if c & seen:
                raise TopologyError("partition classes overlap")
            seen |= c
        if seen != full_mask(self.n_points):
            raise TopologyError("partition does not cover the space")

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if (c >> x) & 1:
                return i
        raise ValueError(f"point {x} outside the space")

    def __len__(self):
        return len(self.classes)


@dataclass(frozen=True)
class HyperPoint:
    """A nonempty subset of base points used as a single hyperspace point."""

    mask: int

    def __post_init__(self):
        if self.mask == 0:
            raise TopologyError("hyperpoints must be nonempty subsets")


@dataclass(frozen=True)
class Hyperspace:
    """A Vietoris hyperspace: the topology plus the base-subset carried by
    each hyperspace point (point i <-> points[i].mask)."""

    topology: FiniteTopology
    points: tuple[HyperPoint, ...]

    @cached_property
    def index(self) -> dict[int, int]:
        return {hp.mask: i for i, hp in enumerate(self.points)}

    def index_of(self, mask: int) -> int | None:
        return self.index.get(mask)


class SetStatus:
    __slots__ = ("is_open", "is_closed", "is_clopen")

    def __init__(self, is_open: bool, is_closed: bool):
        self.is_open = is_open
        self.is_closed = is_closed
        self.is_clopen = is_open and is_closed

    def __repr__(self):
        return (f"SetStatus(open={self.is_open}, closed={self.is_closed}, "
                f"clopen={self.is_clopen})")


class LatticeOrder(Enum):
    FINER = "finer"
    COARSER = "coarser"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


# -------------------------------------------------------------- validation

def validate_topology(n: int, family: Iterable[int]) -> FiniteTopology:
    """Check the three open-set axioms on an explicit family of masks."""
    if n < 1:
        raise TopologyError("a space needs at least one point")
    full = full_mask(n)
    fam = set()
    for o in family:
        if o & ~full:
            raise TopologyError(f"open set {o:#x} contains points outside [{n}]")
        fam.add(int(o))
    if 0 not in fam or full not in fam:
        raise MissingEmptyOrFull(
            f"family must contain the empty set and the full set of {n} points")
    for a, b in combinations(sorted(fam), 2):
        if (a | b) not in fam:
            raise NotClosedUnderUnion(a, b)
        if (a & b) not in fam:
            raise NotClosedUnderIntersection(a, b)
    return _from_opens(n, frozenset(fam))


# ----------------------------------------------------------- constructions

def trivial_topology(n: int) -> FiniteTopology:
    return _from_opens(n, frozenset({0, full_mask(n)}))


def discrete_topology(n: int) -> FiniteTopology:
    t = FiniteTopology(n, tuple(1 << x for x in range(n)))
    if n <= OPENS_SCAN_LIMIT:
        t.__dict__["opens"] = frozenset(range(1 << n))
    return t


def canonical_topology(kind: str, n: int) -> FiniteTopology:
    if kind == "trivial":
        return trivial_topology(n)
    if kind == "discrete":
        return discrete_topology(n)
    raise ValueError(f"unknown canonical topology kind {kind!r}")


def close_under_unions(family: Iterable[int]) -> set[int]:
    """Fixpoint closure under binary union (= closure under arbitrary
    unions for a finite family)."""
    fam = set(family)
    work = list(fam)
    while work:
        a = work.pop()
        for b in list(fam):
            u = a | b
            if u not in fam:
                fam.add(u)
                work.append(u)
    return fam


def close_family(family: Iterable[int]) -> set[int]:
    """Fixpoint closure under binary union and intersection."""
    fam = set(family)
    work = list(fam)
    while work:
        a = work.pop()
        for b in list(fam):
            for c in (a | b, a & b):
                if c not in fam:
                    fam.add(c)
                    work.append(c)
    return fam


def generate_from_basis(n: int, basis: Iterable[int]) -> FiniteTopology:
    """Topology whose opens are exactly the unions of basis sets."""
    full = full_mask(n)
    base = set()
    for o in basis:
        if o & ~full:
            raise TopologyError(f"basis set {o:#x} contains points outside [{n}]")
        base.add(int(o))
    cover = 0
    for o in base:
        cover |= o
    if cover != full:
        raise BasisNotCovering(
            f"basis covers {cover:#x}, not the full set {full:#x}")
    fam = close_under_unions(base)
    fam.add(0)
    fam.add(full)
    # unions distribute over intersections, so pairwise basis intersections
    # landing in the union closure is enough for the intersection axiom
    for a, b in combinations(sorted(base), 2):
        if (a & b) not in fam:
            raise NotABasis(a, b)
    return _from_opens(n, frozenset(fam))


def product_topology(t1: FiniteTopology, t2: FiniteTopology) -> FiniteTopology:
    """Product space on n1*n2 points with pairing (i, j) -> i*n2 + j."""
    n2 = t2.n_points
    mins = []
    for i in range(t1.n_points):
        for j in range(n2):
            m = 0
            for a in iter_bits(t1.mins[i]):
                for b in iter_bits(t2.mins[j]):
                    m |= 1 << (a * n2 + b)
            mins.append(m)
    return FiniteTopology(t1.n_points * n2, tuple(mins))


def pair_index(i: int, j: int, n2: int) -> int:
    return i * n2 + j


def subspace_topology(t: FiniteTopology, s_mask: int
                      ) -> tuple[FiniteTopology, dict[int, int]]:
    """Restrict to the points of s_mask, renumbered densely; also returns the
    old-point -> new-point map."""
    if s_mask == 0:
        raise TopologyError("subspace must be nonempty")
    if s_mask & ~t.full:
        raise TopologyError("subspace leaves the space")
    old = points_of(s_mask)
    index = {p: i for i, p in enumerate(old)}
    mins = []
    for p in old:
        m = 0
        for q in iter_bits(t.mins[p] & s_mask):
            m |= 1 << index[q]
        mins.append(m)
    return FiniteTopology(len(old), tuple(mins)), index


def compress_mask(mask: int, index: dict[int, int]) -> int:
    """Rewrite a mask through an old -> new point map, dropping unmapped points."""
    out = 0
    for p in iter_bits(mask):
        if p in index:
            out |= 1 << index[p]
    return out


# ----------------------------------------------------------------- queries

def set_status(t: FiniteTopology, mask: int) -> SetStatus:
    if mask & ~t.full:
        raise TopologyError("set contains points outside the space")
    return SetStatus(t.is_open(mask), t.is_closed(mask))


def minimal_neighborhood(t: FiniteTopology, x: int) -> int:
    if not 0 <= x < t.n_points:
        raise TopologyError(f"point {x} outside the space")
    return t.mins[x]


def indistinguishability_partition(t: FiniteTopology) -> PointPartition:
    """Classes of points contained in exactly the same opens (equivalently:
    with equal minimal neighborhoods)."""
    groups: dict[int, int] = {}
    for x in range(t.n_points):
        groups[t.mins[x]] = groups.get(t.mins[x], 0) | (1 << x)
    classes = sorted(groups.values(), key=lambda c: (c & -c).bit_length())
    return PointPartition(t.n_points, tuple(classes))


def is_kolmogorov(t: FiniteTopology) -> bool:
    return len(set(t.mins)) == t.n_points


# ------------------------------------------------------------------ lattice

def _require_same_points(t1: FiniteTopology, t2: FiniteTopology):
    if t1.n_points != t2.n_points:
        raise TopologyError("lattice operations need a common point set")


def _finer(t1: FiniteTopology, t2: FiniteTopology) -> bool:
    # more opens <=> smaller minimal neighborhoods
    return all(m1 & ~m2 == 0 for m1, m2 in zip(t1.mins, t2.mins))


def lattice_compare(t1: FiniteTopology, t2: FiniteTopology) -> LatticeOrder:
    _require_same_points(t1, t2)
    f = _finer(t1, t2)
    c = _finer(t2, t1)
    if f and c:
        return LatticeOrder.EQUAL
    if f:
        return LatticeOrder.FINER
    if c:
        return LatticeOrder.COARSER
    return LatticeOrder.INCOMPARABLE


def lattice_meet(t1: FiniteTopology, t2: FiniteTopology) -> FiniteTopology:
    """Intersection of the two open-set families (always a topology)."""
    _require_same_points(t1, t2)
    return _from_opens(t1.n_points, frozenset(t1.opens & t2.opens))


def lattice_join(t1: FiniteTopology, t2: FiniteTopology) -> FiniteTopology:
    """Topology generated by the union of the two families, materialised by
    closing under binary unions and intersections to a fixpoint."""
    _require_same_points(t1, t2)
    fam = close_family(t1.opens | t2.opens)
    return validate_topology(t1.n_points, fam)


# --------------------------------------------------------------- hyperspace

def vietoris_space(t: FiniteTopology, carrier: str = "all_nonempty_subsets",
                   cap: int = DEFAULT_HYPERSPACE_CAP) -> Hyperspace:
    """Hyperspace over the chosen carrier with the topology generated by the
    basis {[A]+, [A]- | A open}, where [A]+ collects the carrier subsets
    inside A and [A]- those meeting A."""
    if carrier == "all_nonempty_subsets":
        if t.n_points > cap:
            raise CapExceeded(
                f"hyperspace over all nonempty subsets of {t.n_points} points "
                f"exceeds the cap of {cap} base points")
        subsets = [m for m in range(1, 1 << t.n_points)]
    elif carrier == "open_sets_only":
        subsets = sorted(o for o in t.opens if o)
    else:
        raise ValueError(f"unknown carrier {carrier!r}")

    n_hyper = len(subsets)
    full_h = full_mask(n_hyper)
    basis: list[int] = []
    for a in t.opens:
        plus = 0
        minus = 0
        for i, w in enumerate(subsets):
            if w & ~a == 0:
                plus |= 1 << i
            if w & a:
                minus |= 1 << i
        basis.append(plus)
        basis.append(minus)

    mins = []
    for i in range(n_hyper):
        m = full_h
        for b in basis:
            if (b >> i) & 1:
                m &= b
        mins.append(m)
    space = FiniteTopology(n_hyper, tuple(mins))
    return Hyperspace(space, tuple(HyperPoint(w) for w in subsets))


def hyper_inside(hyper: Hyperspace, a_mask: int) -> int:
    """[a]+ as a mask of hyperspace points: the subsets contained in a."""
    out = 0
    for i, hp in enumerate(hyper.points):
        if hp.mask & ~a_mask == 0:
            out |= 1 << i
    return out


def hyper_meeting(hyper: Hyperspace, a_mask: int) -> int:
    """[a]- as a mask of hyperspace points: the subsets meeting a."""
    out = 0
    for i, hp in enumerate(hyper.points):
        if hp.mask & a_mask:
            out |= 1 << i
    return out


# -------------------------------------------------------------- enumeration

def enumerate_topologies(n: int) -> Iterator[FiniteTopology]:
    """Every topology on n points exactly once, via the bijection with
    preorders: x <= y iff x lies in every open containing y, so row y of the
    relation is the minimal neighborhood m(y) and opens are the down-closed
    sets (A open iff m(y) <= A for all y in A)."""
    if n < 1:
        raise TopologyError("a space needs at least one point")
    if n > 5:
        raise CapExceeded("topology enumeration supports n <= 5")
    rows = [0] * n

    def rec(i: int) -> Iterator[FiniteTopology]:
        if i == n:
            yield FiniteTopology(n, tuple(rows))
            return
        for mask in range(1 << n):
            if not (mask >> i) & 1:
                continue
            ok = True
            for j in range(i):
                if (mask >> j) & 1 and rows[j] & ~mask:
                    ok = False
                    break
                if (rows[j] >> i) & 1 and mask & ~rows[j]:
                    ok = False
                    break
            if ok:
                rows[i] = mask
                yield from rec(i + 1)

    yield from rec(0)

"""
Finite Topologies
The Topology type, axiom validation, derived operators and subbasis generation.

A Topology keeps two views of its opens: a membership bitset with one
entry per mask (O(1) openness tests in sweeps) and the ascending list of
open masks. Union closure is checked pairwise only: on a finite carrier
closure under pairwise unions gives closure under arbitrary unions, and
the empty union is covered by membership of the empty set.

A valid family is first recognized through its minimal neighbourhoods
(n passes over the 2^n subsets); the pairwise scan only runs to find the
least witness of an invalid one.
"""

from typing import TYPE_CHECKING, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from topocheck.errors import CarrierMismatchError
from topocheck.setcore import Carrier, PointSet, format_mask

if TYPE_CHECKING:
    from topocheck.initial import FiniteFunction

# Rows per block when materializing pair grids
_BLOCK = 1024


# ============ VIOLATION REPORTS ============

class Violation(BaseModel):
    """One violated axiom with its lexicographically least witness."""
    axiom: Literal["empty set", "full carrier", "intersection closure", "union closure"]
    witness: List[int] = []  # masks of the offending pair, if any
    missing: int  # the mask that should have been open

    def describe(self) -> str:
        if self.witness:
            pair = ",".join(format_mask(m) for m in self.witness)
            return f"{self.axiom}: {pair} -> {format_mask(self.missing)} missing"
        return f"{self.axiom}: {format_mask(self.missing)} missing"


class ViolationReport(BaseModel):
    """Every violated axiom of a candidate family, in axiom order."""
    n: int
    violations: List[Violation]

    @property
    def axioms(self) -> List[str]:
        return [v.axiom for v in self.violations]

    def lines(self) -> List[str]:
        return [v.describe() for v in self.violations]


# ============ TOPOLOGY ============

class Topology:
    """
    A validated topology on a finite carrier.
    Build through validate(), generate_from_subbasis() or the named constructors.
    """

    __slots__ = ("carrier", "opens", "member", "opens_array")

    def __init__(self, carrier: Carrier, opens: Sequence[int]):
        arr = np.unique(np.asarray(opens, dtype=np.int64))
        member = np.zeros(carrier.subset_count, dtype=bool)
        member[arr] = True
        arr.setflags(write=False)
        member.setflags(write=False)
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "opens", tuple(int(m) for m in arr))
        object.__setattr__(self, "member", member)
        object.__setattr__(self, "opens_array", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Topology is immutable")

    @property
    def n(self) -> int:
        return self.carrier.size

    @property
    def closed_masks(self) -> Tuple[int, ...]:
        full = self.carrier.full_mask
        return tuple(sorted(full ^ m for m in self.opens))

    def is_open(self, a) -> bool:
        mask = a.mask if isinstance(a, PointSet) else int(a)
        return bool(self.member[mask])

    def open_sets(self) -> List[PointSet]:
        return [PointSet(self.carrier, m) for m in self.opens]

    def sort_key(self) -> Tuple[int, ...]:
        return self.opens

    def __len__(self) -> int:
        return len(self.opens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Topology) and other.n == self.n and other.opens == self.opens

    def __hash__(self) -> int:
        return hash((self.n, self.opens))

    def __repr__(self) -> str:
        body = ",".join(format_mask(m) for m in self.opens)
        return f"Topology(n={self.n}, opens=[{body}])"


def _minimal_neighbourhoods(arr: np.ndarray, n: int) -> List[int]:
    """AND of the members containing x, for every point x; the full mask when none does."""
    full = (1 << n) - 1
    return [int(np.bitwise_and.reduce(arr[((arr >> x) & 1).astype(bool)])) & full for x in range(n)]


def _alexandrov_member(n: int, up_rows: Sequence[int]) -> np.ndarray:
    """Membership of every subset A with up_rows[x] contained in A for each x in A."""
    every = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(len(every), dtype=bool)
    for x, up in enumerate(up_rows):
        has_x = ((every >> x) & 1).astype(bool)
        ok &= ~has_x | ((every & up) == up)
    return ok


def _first_missing_pair(arr: np.ndarray, member: np.ndarray, op) -> Optional[Tuple[int, int, int]]:
    """Least pair (a, b), a < b, whose op(a, b) is not a member."""
    m = len(arr)
    for start in range(0, m, _BLOCK):
        rows = arr[start:start + _BLOCK]
        combined = op(rows[:, None], arr[None, :])
        bad = ~member[combined]
        # keep only j > i
        cols = np.arange(m)[None, :]
        bad &= cols > (np.arange(start, start + len(rows))[:, None])
        hits = np.argwhere(bad)
        if len(hits):
            i, j = hits[0]
            return int(rows[i]), int(arr[j]), int(combined[i, j])
    return None


def validate_masks(n: int, masks: Iterable[int]) -> Tuple[Optional[Topology], Optional[ViolationReport]]:
    """
    Check the topology axioms on a family of raw masks.

    Returns:
        (topology, None) when valid, (None, report) otherwise.
    """
    carrier = Carrier(n)
    arr = np.unique(np.fromiter((int(m) for m in masks), dtype=np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= carrier.subset_count):
        raise CarrierMismatchError(f"family member outside a carrier of size {n}")

    member = np.zeros(carrier.subset_count, dtype=bool)
    member[arr] = True
    full = carrier.full_mask

    # a topology is exactly the Alexandrov topology of its minimal neighbourhoods
    if np.array_equal(member, _alexandrov_member(n, _minimal_neighbourhoods(arr, n))):
        return Topology(carrier, arr), None

    violations = []

    if not member[0]:
        violations.append(Violation(axiom="empty set", missing=0))
    if not member[full]:
        violations.append(Violation(axiom="full carrier", missing=full))

    hit = _first_missing_pair(arr, member, np.bitwise_and)
    if hit:
        violations.append(Violation(axiom="intersection closure", witness=[hit[0], hit[1]], missing=hit[2]))
    hit = _first_missing_pair(arr, member, np.bitwise_or)
    if hit:
        violations.append(Violation(axiom="union closure", witness=[hit[0], hit[1]], missing=hit[2]))

    if violations:
        return None, ViolationReport(n=n, violations=violations)
    return Topology(carrier, arr), None


def validate(carrier: Carrier, family: Iterable[PointSet]) -> Tuple[Optional[Topology], Optional[ViolationReport]]:
    """
    Validate a family of subsets as a topology on `carrier`.

    Raises:
        CarrierMismatchError: a member lives over another carrier.
    """
    masks = []
    for member in family:
        if member.carrier.size != carrier.size:
            raise CarrierMismatchError(
                f"member {member} lives over n={member.carrier.size}, expected n={carrier.size}"
            )
        masks.append(member.mask)
    return validate_masks(carrier.size, masks)


# ============ NAMED TOPOLOGIES ============

def discrete(carrier: Carrier) -> Topology:
    return Topology(carrier, range(carrier.subset_count))


def indiscrete(carrier: Carrier) -> Topology:
    return Topology(carrier, [0, carrier.full_mask])


# ============ DERIVED OPERATORS ============

def closed_sets(t: Topology) -> List[PointSet]:
    """Complements of the opens, ascending mask order."""
    return [PointSet(t.carrier, m) for m in t.closed_masks]


def closure_table(t: Topology, masks) -> np.ndarray:
    """
    Smallest closed superset of every mask in `masks`.
    Closure distributes over finite unions, so cl(A) is the union of the
    point closures cl({x}) for x in A, and cl({}) is empty.
    """
    masks = np.asarray(masks, dtype=np.int64)
    point_closures = _minimal_neighbourhoods(t.carrier.full_mask ^ t.opens_array, t.n)
    out = np.zeros(len(masks), dtype=np.int64)
    for x, cl in enumerate(point_closures):
        out |= np.where((masks >> x) & 1, cl, 0)
    return out


def closure_of(t: Topology, a: PointSet) -> PointSet:
    if a.carrier.size != t.n:
        raise CarrierMismatchError(f"subset over n={a.carrier.size}, topology over n={t.n}")
    return PointSet(t.carrier, int(closure_table(t, [a.mask])[0]))


def interior_of(t: Topology, a: PointSet) -> PointSet:
    if a.carrier.size != t.n:
        raise CarrierMismatchError(f"subset over n={a.carrier.size}, topology over n={t.n}")
    inside = t.opens_array[(t.opens_array & ~a.mask) == 0]
    return PointSet(t.carrier, int(np.bitwise_or.reduce(inside)))


# ============ COMPARISON & CONTINUITY ============

def is_finer(t1: Topology, t2: Topology) -> bool:
    """True iff every open of t2 is open in t1."""
    if t1.n != t2.n:
        raise CarrierMismatchError(f"cannot compare topologies on n={t1.n} and n={t2.n}")
    return not bool(np.any(t2.member & ~t1.member))


def is_continuous(f: "FiniteFunction", tY: Topology, tX: Topology) -> bool:
    """True iff the preimage of every open of tX is open in tY."""
    if f.dom.size != tY.n or f.cod.size != tX.n:
        raise CarrierMismatchError(
            f"function n={f.dom.size}->n={f.cod.size} does not match topologies on "
            f"n={tY.n} and n={tX.n}"
        )
    return bool(tY.member[f.preimage_masks(tX.opens_array)].all())


# ============ GENERATION ============

def alexandrov_topology(carrier: Carrier, up_rows: Sequence[int]) -> Topology:
    """
    Opens = sets A with up_rows[x] a subset of A for every x in A.
    With up_rows[x] the minimal open neighbourhood of x this is the
    topology those neighbourhoods generate.
    """
    ok = _alexandrov_member(carrier.size, up_rows)
    return Topology(carrier, np.flatnonzero(ok))


def generate_from_subbasis(carrier: Carrier, family: Iterable[PointSet]) -> Topology:
    """
    Smallest topology containing `family`.

    Closing under finite intersections (the empty one is the carrier) and
    then under unions is computed point-wise: the minimal neighbourhood of
    x is the intersection of the members containing x, and the opens are
    exactly the unions of minimal neighbourhoods.
    """
    full = carrier.full_mask
    up = [full] * carrier.size
    for s in family:
        if s.carrier.size != carrier.size:
            raise CarrierMismatchError(f"subbasis member {s} lives over n={s.carrier.size}")
        for x in range(carrier.size):
            if (s.mask >> x) & 1:
                up[x] &= s.mask
    return alexandrov_topology(carrier, up)


def specialization_preorder(t: Topology) -> Tuple[int, ...]:
    """
    up[x] = minimal open neighbourhood of x, so that y is in up[x]
    iff x lies in the closure of {y}.
    """
    return tuple(_minimal_neighbourhoods(t.opens_array, t.n))

"""
Subspace Topology
The relative topology on Y, built three independent ways:

1. direct image:  {U & Y : U open}
2. canonical:     every relatively open V gets the largest open U* with
                  U* & Y = V (the union of all such opens), and the
                  intersection/union steps are re-executed with those
                  representatives, producing a certificate; the relative
                  family is read off the representatives and the certified
                  intersections and unions, never off the parent's traces
3. via closure:   A -> closure(A) & Y is a Kuratowski operation on Y whose
                  topology is the relative topology

Subspace carriers are relabeled 0..|Y|-1 in increasing parent order.
Y = empty is legal and gives the one topology on the empty carrier.
"""

from typing import List, Optional

import numpy as np

from topocheck.closure import topology_from_closure, validate_kuratowski
from topocheck.errors import (
    CarrierMismatchError,
    ConstructionError,
    NotRelativelyOpenError,
    PreconditionError,
)
from topocheck.setcore import Carrier, PointSet, compress_masks, expand_masks, format_mask, members
from topocheck.topology import Topology, closure_table, validate_masks


class Certificate:
    """
    The identities the representative-based proof asserts, for every
    relatively open set, every pair of them and the whole family:

        U*_i is open  and  U*_i & Y = V_i
        (U*_i op U*_j) is open  and  (U*_i op U*_j) & Y = V_i op V_j

    Masks are in parent labels. Lines are rendered on demand in ascending
    (V_i, V_j) order.
    """

    def __init__(self, parent: Topology, ymask: int, relative: np.ndarray, representatives: np.ndarray):
        self.ymask = ymask
        self.relative = relative
        self.representatives = representatives

        i, j = np.triu_indices(len(relative), k=1)
        self._i, self._j = i, j
        ui, uj = representatives[i], representatives[j]
        vi, vj = relative[i], relative[j]

        self.representatives_ok = parent.member[representatives] & ((representatives & ymask) == relative)
        self.intersections = ui & uj
        self.unions = ui | uj
        self.intersection_ok = parent.member[self.intersections] & ((self.intersections & ymask) == (vi & vj))
        self.union_ok = parent.member[self.unions] & ((self.unions & ymask) == (vi | vj))

        self.family_union = int(np.bitwise_or.reduce(representatives)) if len(representatives) else 0
        family_target = int(np.bitwise_or.reduce(relative)) if len(relative) else 0
        self.family_ok = bool(parent.member[self.family_union]) and (self.family_union & ymask) == family_target

    @property
    def holds(self) -> bool:
        return bool(
            self.representatives_ok.all() and self.intersection_ok.all() and self.union_ok.all() and self.family_ok
        )

    def __len__(self) -> int:
        pairs = 2 * len(self._i)
        return pairs + 1 if pairs else 0

    def lines(self) -> List[str]:
        out = []
        rel, reps = self.relative, self.representatives
        for k in np.flatnonzero(~self.representatives_ok):
            v, u = format_mask(int(rel[k])), format_mask(int(reps[k]))
            out.append(f"representative U*({v})={u} is not an open set with trace {v} FAIL")
        for k in range(len(self._i)):
            i, j = self._i[k], self._j[k]
            vi, vj = format_mask(int(rel[i])), format_mask(int(rel[j]))
            ui, uj = format_mask(int(reps[i])), format_mask(int(reps[j]))
            for kind, sym, w, ok in (
                ("intersection", "&", self.intersections[k], self.intersection_ok[k]),
                ("union", "|", self.unions[k], self.union_ok[k]),
            ):
                w = int(w)
                out.append(
                    f"{kind} {vi} {sym} {vj}: U*({vi})={ui} {sym} U*({vj})={uj} = {format_mask(w)}; "
                    f"{format_mask(w)} & Y = {format_mask(w & self.ymask)} {'ok' if ok else 'FAIL'}"
                )
        if out:
            w = self.family_union
            out.append(
                f"family union of {len(rel)} sets: U* union = {format_mask(w)}; "
                f"{format_mask(w)} & Y = {format_mask(w & self.ymask)} {'ok' if self.family_ok else 'FAIL'}"
            )
        return out


class SubspaceView:
    """A subspace topology plus its order-preserving embedding into the parent."""

    __slots__ = ("parent", "ymask", "sub", "embed", "certificate")

    def __init__(self, parent: Topology, ymask: PointSet, sub: Topology, certificate: Optional[Certificate] = None):
        self.parent = parent
        self.ymask = ymask
        self.sub = sub
        self.embed = members(ymask.mask)
        self.certificate = certificate

    def relabel(self, mask: int) -> int:
        """Parent mask -> sub mask (points outside Y are dropped)."""
        return int(compress_masks([mask], self.embed)[0])

    def lift(self, mask: int) -> int:
        """Sub mask -> parent mask."""
        return int(expand_masks([mask], self.embed)[0])

    def position(self, point: int) -> int:
        """embed^-1: index of a parent point of Y in the sub carrier."""
        return self.embed.index(point)

    def __repr__(self) -> str:
        return f"SubspaceView(Y={self.ymask}, sub={self.sub!r})"


def _check_carrier(t: Topology, *sets: PointSet) -> None:
    for s in sets:
        if s.carrier.size != t.n:
            raise CarrierMismatchError(f"subset {s} over n={s.carrier.size}, topology over n={t.n}")


def _relabeled_topology(masks: np.ndarray, embed) -> Topology:
    sub, report = validate_masks(len(embed), compress_masks(masks, embed))
    if report:
        raise ConstructionError(f"relative family is not a topology: {report.lines()}")
    return sub


# ============ DIRECT IMAGE ============

def subspace_topology(t: Topology, y: PointSet) -> SubspaceView:
    """{U & Y : U open}, relabeled onto |Y| points."""
    _check_carrier(t, y)
    embed = members(y.mask)
    return SubspaceView(t, y, _relabeled_topology(t.opens_array & y.mask, embed))


# ============ REPRESENTATIVES ============

def _require_relative_candidate(t: Topology, y: PointSet, v: PointSet) -> np.ndarray:
    _check_carrier(t, y, v)
    if v.mask & ~y.mask:
        raise PreconditionError(f"{v} is not a subset of Y={y}")
    return t.opens_array[(t.opens_array & y.mask) == v.mask]


def open_representatives(t: Topology, y: PointSet, v: PointSet) -> List[PointSet]:
    """Every open W with W & Y = V, ascending."""
    return [PointSet(t.carrier, int(w)) for w in _require_relative_candidate(t, y, v)]


def maximal_open_representative(t: Topology, y: PointSet, v: PointSet) -> PointSet:
    """
    The largest open U* with U* & Y = V: the union of every such open.

    Raises:
        PreconditionError: V is not a subset of Y.
        NotRelativelyOpenError: no open set has trace V.
    """
    candidates = _require_relative_candidate(t, y, v)
    if not len(candidates):
        raise NotRelativelyOpenError(f"{v} is not relatively open in Y={y}")
    u = int(np.bitwise_or.reduce(candidates))
    if not t.member[u] or (u & y.mask) != v.mask:
        raise ConstructionError(f"union of representatives of {v} is not a representative")
    return PointSet(t.carrier, u)


def _canonical_representatives(t: Topology, ymask: int):
    """
    (V, U*) for every relatively open V, ascending V. U* is the union of
    the opens in the group of V, the same rule as maximal_open_representative.
    """
    traces = t.opens_array & ymask
    order = np.argsort(traces, kind="stable")
    grouped = traces[order]
    relative, starts = np.unique(grouped, return_index=True)
    representatives = np.bitwise_or.reduceat(t.opens_array[order], starts)
    return relative, representatives


# ============ CANONICAL ============

def subspace_topology_canonical(t: Topology, y: PointSet) -> SubspaceView:
    """
    Relative topology through canonical representatives, with a certificate
    of the intersection and union identities the construction relies on.
    """
    _check_carrier(t, y)
    embed = members(y.mask)
    full = t.carrier.full_mask

    # empty = empty & Y and Y = X & Y
    if not (t.member[0] and t.member[full]):
        raise ConstructionError("parent lacks the empty set or the carrier")

    relative, representatives = _canonical_representatives(t, y.mask)
    certificate = Certificate(t, y.mask, relative, representatives)
    if not certificate.holds:
        raise ConstructionError(f"representative identities failed for Y={y}")

    # certified opens only; their traces are the relative family
    certified = np.concatenate([
        representatives,
        certificate.intersections,
        certificate.unions,
        np.array([certificate.family_union, 0, full], dtype=np.int64),
    ])
    return SubspaceView(t, y, _relabeled_topology(certified & y.mask, embed), certificate)


# ============ VIA CLOSURE ============

def subspace_via_closure(t: Topology, y: PointSet) -> SubspaceView:
    """Topology of the Kuratowski operation A -> closure(A) & Y on subsets of Y."""
    _check_carrier(t, y)
    embed = members(y.mask)
    sub_carrier = Carrier(len(embed))

    inputs = expand_masks(np.arange(sub_carrier.subset_count, dtype=np.int64), embed)
    tilde = closure_table(t, inputs) & y.mask
    op, report = validate_kuratowski(sub_carrier, compress_masks(tilde, embed))
    if report:
        raise ConstructionError(f"relative closure is not Kuratowski: {report.lines()}")
    return SubspaceView(t, y, topology_from_closure(op))

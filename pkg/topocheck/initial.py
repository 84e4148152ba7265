"""
Initial (Weak) Topology
The weakest topology on the domain of f making f continuous, built three ways:

1. direct:      {f^-1(U) : U open}
2. via image:   corestrict f onto Z = f(Y) (surjective), take the subspace
                topology on Z, then the direct construction through it
3. via closure: A -> f^-1(closure(f(A))) is a Kuratowski operation on Y

Empty domain and empty codomain are legal; with an empty codomain only the
empty domain admits a function.
"""

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from topocheck.closure import topology_from_closure, validate_kuratowski
from topocheck.errors import CarrierError, CarrierMismatchError, ConstructionError, PartialTableError
from topocheck.setcore import Carrier, PointSet, format_mask, mask_of
from topocheck.subspace import SubspaceView, subspace_topology
from topocheck.topology import Topology, closure_table, is_continuous, is_finer, validate_masks


class FiniteFunction:
    """A total map dom -> cod stored as a lookup table."""

    __slots__ = ("dom", "cod", "table")

    def __init__(self, dom: Carrier, cod: Carrier, table: Sequence[int]):
        table = tuple(int(v) for v in table)
        if len(table) != dom.size:
            raise PartialTableError(f"function table has {len(table)} entries, domain has {dom.size} points")
        for point, value in enumerate(table):
            if not 0 <= value < cod.size:
                raise CarrierError(f"f({point}) = {value} is outside a codomain of size {cod.size}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteFunction is immutable")

    @property
    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    def __call__(self, point: int) -> int:
        return self.table[point]

    def preimage_masks(self, masks) -> np.ndarray:
        """f^-1 applied to an array of codomain masks."""
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros_like(masks)
        for y, x in enumerate(self.table):
            out |= ((masks >> x) & 1) << y
        return out

    def image_masks(self, masks) -> np.ndarray:
        """f applied to an array of domain masks."""
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros_like(masks)
        for y, x in enumerate(self.table):
            out |= ((masks >> y) & 1) << x
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteFunction)
            and other.dom == self.dom
            and other.cod == self.cod
            and other.table == self.table
        )

    def __hash__(self) -> int:
        return hash((self.dom.size, self.cod.size, self.table))

    def __repr__(self) -> str:
        return f"FiniteFunction(n={self.dom.size}->n={self.cod.size}, {list(self.table)})"


# ============ CONSTRUCTORS ============

def identity(c: Carrier) -> FiniteFunction:
    return FiniteFunction(c, c, range(c.size))


def constant(dom: Carrier, cod: Carrier, value: int = 0) -> FiniteFunction:
    return FiniteFunction(dom, cod, [value] * dom.size)


def inclusion(view: SubspaceView) -> FiniteFunction:
    """The embedding |Y| -> X of a subspace, as an injective function."""
    return FiniteFunction(view.sub.carrier, view.parent.carrier, view.embed)


# ============ SET OPERATIONS ============

def preimage(f: FiniteFunction, u: PointSet) -> PointSet:
    if u.carrier.size != f.cod.size:
        raise CarrierMismatchError(f"subset over n={u.carrier.size}, codomain is n={f.cod.size}")
    return PointSet(f.dom, int(f.preimage_masks([u.mask])[0]))


def image_of(f: FiniteFunction, a: PointSet) -> PointSet:
    if a.carrier.size != f.dom.size:
        raise CarrierMismatchError(f"subset over n={a.carrier.size}, domain is n={f.dom.size}")
    return PointSet(f.cod, int(f.image_masks([a.mask])[0]))


def image_set(f: FiniteFunction) -> PointSet:
    return PointSet(f.cod, mask_of(f.table))


def _check_codomain(tX: Topology, f: FiniteFunction) -> None:
    if f.cod.size != tX.n:
        raise CarrierMismatchError(f"function codomain n={f.cod.size}, topology over n={tX.n}")


# ============ CONSTRUCTIONS ============

def initial_topology_direct(tX: Topology, f: FiniteFunction) -> Topology:
    """{f^-1(U) : U open in tX}."""
    _check_codomain(tX, f)
    t, report = validate_masks(f.dom.size, f.preimage_masks(tX.opens_array))
    if report:
        raise ConstructionError(f"preimage family is not a topology: {report.lines()}")
    return t


def corestriction(tX: Topology, f: FiniteFunction) -> Tuple[FiniteFunction, SubspaceView]:
    """f viewed as a surjection onto Z = f(Y), relabeled through the subspace embedding."""
    _check_codomain(tX, f)
    view = subspace_topology(tX, image_set(f))
    g = FiniteFunction(f.dom, view.sub.carrier, [view.position(x) for x in f.table])
    return g, view


def initial_topology_via_image(tX: Topology, f: FiniteFunction) -> Topology:
    g, view = corestriction(tX, f)
    return initial_topology_direct(view.sub, g)


def initial_topology_via_closure(tX: Topology, f: FiniteFunction) -> Topology:
    """Topology of the Kuratowski operation A -> f^-1(closure(f(A)))."""
    _check_codomain(tX, f)
    every = np.arange(f.dom.subset_count, dtype=np.int64)
    tilde = f.preimage_masks(closure_table(tX, f.image_masks(every)))
    op, report = validate_kuratowski(f.dom, tilde)
    if report:
        raise ConstructionError(f"pulled-back closure is not Kuratowski: {report.lines()}")
    return topology_from_closure(op)


def is_continuous_via_image(f: FiniteFunction, tY: Topology, tX: Topology) -> bool:
    """Continuity of the corestriction into the subspace on f(Y)."""
    g, view = corestriction(tX, f)
    return is_continuous(g, tY, view.sub)


# ============ MINIMALITY ============

class WeakestVerdict(BaseModel):
    holds: bool
    reason: str
    witness_open: Optional[int] = None  # open of tX whose preimage is not open
    witness_topology: Optional[List[int]] = None  # a strictly weaker continuous topology

    def describe(self) -> str:
        text = self.reason
        if self.witness_open is not None:
            text += f" (preimage of {format_mask(self.witness_open)} is not open)"
        if self.witness_topology is not None:
            text += " (weaker: [" + ",".join(format_mask(m) for m in self.witness_topology) + "])"
        return text


def _continuity_failure(tX: Topology, f: FiniteFunction, tY: Topology) -> Optional[WeakestVerdict]:
    if tY.n != f.dom.size:
        raise CarrierMismatchError(f"topology over n={tY.n}, function domain is n={f.dom.size}")
    _check_codomain(tX, f)
    bad = ~tY.member[f.preimage_masks(tX.opens_array)]
    if bad.any():
        return WeakestVerdict(
            holds=False,
            reason="not continuous",
            witness_open=int(tX.opens_array[np.argmax(bad)]),
        )
    return None


def verify_weakest(tX: Topology, f: FiniteFunction, tY: Topology) -> WeakestVerdict:
    """
    tY is the weakest topology making f continuous iff f is continuous and
    every open of tY is a preimage: each preimage must be open in any
    continuous topology, so the preimage family is below all of them.
    """
    failure = _continuity_failure(tX, f, tY)
    if failure:
        return failure
    preimages = np.unique(f.preimage_masks(tX.opens_array))
    extra = np.setdiff1d(tY.opens_array, preimages)
    if len(extra):
        return WeakestVerdict(
            holds=False,
            reason=f"not the weakest: {format_mask(int(extra[0]))} is not a preimage",
            witness_topology=[int(m) for m in preimages],
        )
    return WeakestVerdict(holds=True, reason="continuous and weakest")


def verify_weakest_by_census(tX: Topology, f: FiniteFunction, tY: Topology, census: Iterable[Topology]) -> WeakestVerdict:
    """Independent oracle: every continuous topology in the census must be finer than tY."""
    failure = _continuity_failure(tX, f, tY)
    if failure:
        return failure
    offenders = [s for s in census if is_continuous(f, s, tX) and not is_finer(s, tY)]
    if offenders:
        weaker = next((s for s in offenders if is_finer(tY, s)), offenders[0])
        return WeakestVerdict(
            holds=False,
            reason="not the weakest: a continuous topology is not finer",
            witness_topology=list(weaker.opens),
        )
    return WeakestVerdict(holds=True, reason="continuous and weakest")

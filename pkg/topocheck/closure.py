"""
Kuratowski Closure Operations
Validation (K1-K4), the operator -> topology theorem and its inverse.

Tables are dense integer arrays indexed by input mask. The axioms are
checked exactly as grouped in the definition:
    K1  cl(empty) = empty
    K2  A is a subset of cl(A)
    K3  cl(cl(A)) = cl(A)
    K4  cl(A | B) = cl(A) | cl(B)
Monotonicity is a consequence of K4 and is not checked here.
"""

from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from topocheck.errors import CarrierMismatchError, ConstructionError, PartialTableError
from topocheck.setcore import Carrier, PointSet, format_mask
from topocheck.topology import Topology, closure_table, validate_masks


class ClosureViolation(BaseModel):
    axiom: Literal["K1", "K2", "K3", "K4"]
    witness: List[int]  # one input mask, or a pair for K4

    def describe(self) -> str:
        names = {
            "K1": "empty closure",
            "K2": "extensivity",
            "K3": "idempotence",
            "K4": "union preservation",
        }
        sets = ",".join(format_mask(m) for m in self.witness)
        return f"{self.axiom} {names[self.axiom]}: {sets}"


class ClosureReport(BaseModel):
    n: int
    violations: List[ClosureViolation]

    @property
    def axioms(self) -> List[str]:
        return [v.axiom for v in self.violations]

    def lines(self) -> List[str]:
        return [v.describe() for v in self.violations]


class ClosureOperator:
    """A validated Kuratowski closure operation; build through validate_kuratowski()."""

    __slots__ = ("carrier", "table")

    def __init__(self, carrier: Carrier, table: np.ndarray):
        table = np.array(table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("ClosureOperator is immutable")

    @property
    def n(self) -> int:
        return self.carrier.size

    def __call__(self, a: PointSet) -> PointSet:
        if a.carrier.size != self.n:
            raise CarrierMismatchError(f"subset over n={a.carrier.size}, operator over n={self.n}")
        return PointSet(self.carrier, int(self.table[a.mask]))

    def fixed_points(self) -> np.ndarray:
        every = np.arange(self.carrier.subset_count, dtype=np.int64)
        return every[self.table == every]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClosureOperator)
            and other.n == self.n
            and np.array_equal(other.table, self.table)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.table.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{format_mask(a)}->{format_mask(int(b))}" for a, b in enumerate(self.table))
        return f"ClosureOperator(n={self.n}, {body})"


# ============ BATCH AXIOM CHECKS ============

def _union_decomposition(tables: np.ndarray) -> np.ndarray:
    """
    D(A) = cl(empty) | OR of cl({x}) over x in A, for every row.
    K4 holds for a table iff the table equals D.
    """
    size = tables.shape[1]
    d = np.empty_like(tables)
    d[:, 0] = tables[:, 0]
    for a in range(1, size):
        low = a & -a
        d[:, a] = d[:, a & (a - 1)] | tables[:, low]
    return d


def kuratowski_axioms(tables: np.ndarray) -> np.ndarray:
    """
    Per-row verdicts for a batch of raw tables, shape (batch, 2^n).
    Returns a bool array of shape (batch, 4): columns K1..K4.
    """
    tables = np.asarray(tables, dtype=np.int64)
    every = np.arange(tables.shape[1], dtype=np.int64)
    k1 = tables[:, 0] == 0
    k2 = ((tables & every) == every).all(axis=1)
    k3 = (np.take_along_axis(tables, tables, axis=1) == tables).all(axis=1)
    k4 = (tables == _union_decomposition(tables)).all(axis=1)
    return np.stack([k1, k2, k3, k4], axis=1)


def kuratowski_accepts(tables: np.ndarray) -> np.ndarray:
    return kuratowski_axioms(tables).all(axis=1)


def _least_union_witness(table: np.ndarray) -> List[int]:
    every = np.arange(len(table), dtype=np.int64)
    for a in range(len(table)):
        rest = every[a + 1:]
        bad = table[a | rest] != (table[a] | table[rest])
        if bad.any():
            return [a, int(rest[np.argmax(bad)])]
    return []


# ============ OPERATIONS ============

def validate_kuratowski(carrier: Carrier, table: Sequence) -> Tuple[Optional[ClosureOperator], Optional[ClosureReport]]:
    """
    Validate a raw closure table indexed by input mask.
    Entries may be ints or PointSets.

    Raises:
        PartialTableError: the table has no entry for some subset.
        CarrierMismatchError: an entry lies outside the carrier.
    """
    raw = [e.mask if isinstance(e, PointSet) else int(e) for e in table]
    if len(raw) != carrier.subset_count:
        raise PartialTableError(
            f"closure table has {len(raw)} entries, a carrier of size {carrier.size} "
            f"needs {carrier.subset_count}"
        )
    arr = np.asarray(raw, dtype=np.int64)
    if len(arr) and (arr.min() < 0 or arr.max() > carrier.full_mask):
        raise CarrierMismatchError(f"closure table entry outside a carrier of size {carrier.size}")

    verdict = kuratowski_axioms(arr[None, :])[0]
    if verdict.all():
        return ClosureOperator(carrier, arr), None

    every = np.arange(len(arr), dtype=np.int64)
    violations = []
    if not verdict[0]:
        violations.append(ClosureViolation(axiom="K1", witness=[0]))
    if not verdict[1]:
        a = int(np.argmax((arr & every) != every))
        violations.append(ClosureViolation(axiom="K2", witness=[a]))
    if not verdict[2]:
        a = int(np.argmax(arr[arr] != arr))
        violations.append(ClosureViolation(axiom="K3", witness=[a]))
    if not verdict[3]:
        violations.append(ClosureViolation(axiom="K4", witness=_least_union_witness(arr)))
    return None, ClosureReport(n=carrier.size, violations=violations)


def topology_from_closure(op: ClosureOperator) -> Topology:
    """
    The unique topology whose closed sets are the fixed points of `op`.
    Asserts that its closure operator reproduces the table.
    """
    full = op.carrier.full_mask
    t, report = validate_masks(op.n, full ^ op.fixed_points())
    if report:
        raise ConstructionError(f"fixed points of a Kuratowski operator failed: {report.lines()}")
    every = np.arange(op.carrier.subset_count, dtype=np.int64)
    if not np.array_equal(closure_table(t, every), op.table):
        raise ConstructionError("closure in the induced topology differs from the operator")
    return t


def closure_from_topology(t: Topology) -> ClosureOperator:
    """The closure operator A -> closure_of(t, A), validated."""
    every = np.arange(t.carrier.subset_count, dtype=np.int64)
    op, report = validate_kuratowski(t.carrier, closure_table(t, every))
    if report:
        raise ConstructionError(f"closure of a topology failed Kuratowski: {report.lines()}")
    return op


def is_monotone(op: ClosureOperator) -> bool:
    """A subset of B implies cl(A) subset of cl(B), for all pairs."""
    every = np.arange(op.carrier.subset_count, dtype=np.int64)
    sub = (every[:, None] & ~every[None, :]) == 0
    contained = (op.table[:, None] & ~op.table[None, :]) == 0
    return bool(np.all(~sub | contained))

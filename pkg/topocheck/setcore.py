"""
Set Core - Carriers and Bitmask Subsets
Exact set algebra over carriers of at most 16 points.

A subset is a bitmask: bit i set <=> point i is a member.
Ascending mask order is the canonical enumeration order everywhere.
"""

from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from topocheck.errors import CarrierError, CarrierMismatchError, FormatError

MAX_CARRIER = 16


class Carrier:
    """A finite set of points labeled 0..size-1."""

    __slots__ = ("size",)

    def __init__(self, size: int):
        if not isinstance(size, (int, np.integer)) or isinstance(size, bool):
            raise CarrierError(f"carrier size must be an integer, got {size!r}")
        if not 0 <= size <= MAX_CARRIER:
            raise CarrierError(f"carrier size must lie in 0..{MAX_CARRIER}, got {size}")
        object.__setattr__(self, "size", int(size))

    def __setattr__(self, name, value):
        raise AttributeError("Carrier is immutable")

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def subset_count(self) -> int:
        return 1 << self.size

    def empty(self) -> "PointSet":
        return PointSet(self, 0)

    def full(self) -> "PointSet":
        return PointSet(self, self.full_mask)

    def points(self) -> range:
        return range(self.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Carrier) and other.size == self.size

    def __hash__(self) -> int:
        return hash(("Carrier", self.size))

    def __repr__(self) -> str:
        return f"Carrier({self.size})"


class PointSet:
    """An immutable subset of a carrier, compared by (carrier size, mask)."""

    __slots__ = ("carrier", "mask")

    def __init__(self, carrier: Carrier, mask: int = 0):
        mask = int(mask)
        if mask < 0 or mask >> carrier.size:
            raise CarrierError(f"mask {mask:#x} has points outside a carrier of size {carrier.size}")
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def of(cls, carrier: Carrier, points: Iterable[int]) -> "PointSet":
        """Build a subset from point labels."""
        mask = 0
        for p in points:
            if not 0 <= p < carrier.size:
                raise CarrierError(f"point {p} is outside a carrier of size {carrier.size}")
            mask |= 1 << p
        return cls(carrier, mask)

    def __setattr__(self, name, value):
        raise AttributeError("PointSet is immutable")

    def __iter__(self) -> Iterator[int]:
        return iter(members(self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, point: int) -> bool:
        return 0 <= point < self.carrier.size and bool((self.mask >> point) & 1)

    def __or__(self, other: "PointSet") -> "PointSet":
        return union(self, other)

    def __and__(self, other: "PointSet") -> "PointSet":
        return intersect(self, other)

    def __sub__(self, other: "PointSet") -> "PointSet":
        return difference(self, other)

    def __invert__(self) -> "PointSet":
        return complement(self)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PointSet)
            and other.carrier.size == self.carrier.size
            and other.mask == self.mask
        )

    def __hash__(self) -> int:
        return hash((self.carrier.size, self.mask))

    def __repr__(self) -> str:
        return f"PointSet({format_mask(self.mask)}, n={self.carrier.size})"

    def __str__(self) -> str:
        return format_mask(self.mask)


# ============ MASK HELPERS ============

def members(mask: int) -> Tuple[int, ...]:
    """Point labels of a mask, ascending."""
    out = []
    point = 0
    while mask:
        if mask & 1:
            out.append(point)
        mask >>= 1
        point += 1
    return tuple(out)


def mask_of(points: Iterable[int]) -> int:
    mask = 0
    for p in points:
        mask |= 1 << p
    return mask


def format_mask(mask: int) -> str:
    """Element-list form, e.g. {0,2,3}."""
    return "{" + ",".join(str(p) for p in members(mask)) + "}"


def _require_same_carrier(a: PointSet, b: PointSet) -> None:
    if a.carrier.size != b.carrier.size:
        raise CarrierMismatchError(
            f"subsets over different carriers (n={a.carrier.size} vs n={b.carrier.size})"
        )


# ============ SET ALGEBRA ============

def union(a: PointSet, b: PointSet) -> PointSet:
    _require_same_carrier(a, b)
    return PointSet(a.carrier, a.mask | b.mask)


def intersect(a: PointSet, b: PointSet) -> PointSet:
    _require_same_carrier(a, b)
    return PointSet(a.carrier, a.mask & b.mask)


def complement(a: PointSet) -> PointSet:
    return PointSet(a.carrier, a.carrier.full_mask ^ a.mask)


def difference(a: PointSet, b: PointSet) -> PointSet:
    _require_same_carrier(a, b)
    return PointSet(a.carrier, a.mask & ~b.mask)


def is_subset(a: PointSet, b: PointSet) -> bool:
    _require_same_carrier(a, b)
    return a.mask & ~b.mask == 0


def all_subsets(c: Carrier) -> List[PointSet]:
    """All 2^n subsets, ascending mask order."""
    return [PointSet(c, m) for m in range(c.subset_count)]


# ============ RELABELING ============

def compress_masks(masks, points: Sequence[int]) -> np.ndarray:
    """
    Relabel parent masks onto the ordered point list: bit points[i] -> bit i.
    Bits outside `points` are dropped.
    """
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for i, p in enumerate(points):
        out |= ((masks >> p) & 1) << i
    return out


def expand_masks(masks, points: Sequence[int]) -> np.ndarray:
    """Inverse of compress_masks: bit i -> bit points[i]."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for i, p in enumerate(points):
        out |= ((masks >> i) & 1) << p
    return out


# ============ TEXTUAL FORMS ============

def parse_point_set(text: str, carrier: Carrier) -> PointSet:
    """
    Parse "{0,2,3}" (element list) or "1101" (bitstring, rightmost char = point 0).
    A bitstring must have exactly carrier.size characters.
    """
    token = text.strip()
    if token.startswith("{"):
        if not token.endswith("}"):
            raise FormatError(f"unterminated element list {text!r}", "subset")
        inner = token[1:-1].strip()
        points = []
        if inner:
            for i, part in enumerate(inner.split(",")):
                part = part.strip()
                if not (part.isascii() and part.isdigit()):
                    raise FormatError(f"element {i} is not a point label: {part!r}", "subset")
                points.append(int(part))
        for p in points:
            if p >= carrier.size:
                raise FormatError(f"point {p} is outside a carrier of size {carrier.size}", "subset")
        return PointSet.of(carrier, points)

    if any(ch not in "01" for ch in token):
        raise FormatError(f"expected an element list or a bitstring, got {text!r}", "subset")
    if len(token) != carrier.size:
        raise FormatError(
            f"bitstring has {len(token)} digits, carrier has {carrier.size} points", "subset"
        )
    return PointSet(carrier, int(token, 2) if token else 0)


def format_point_set(a: PointSet) -> str:
    return format_mask(a.mask)


def format_bitstring(a: PointSet) -> str:
    return format(a.mask, f"0{a.carrier.size}b") if a.carrier.size else ""

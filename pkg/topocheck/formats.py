"""
File Formats
Canonical JSON records for topologies, closure operators and functions.

    topology:  {"n":2,"opens":[[],[0],[0,1]]}
    operator:  {"n":1,"table":[[],[0]]}          index = input mask
    function:  {"dom_n":2,"cod_n":3,"table":[0,2]}

Emission is compact and canonical (opens ascending by mask). Every emitted
record re-parses to an equal value.
"""

import hashlib
from typing import List, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator

from topocheck.closure import ClosureOperator
from topocheck.errors import CarrierError, FormatError, PartialTableError, TopocheckError
from topocheck.initial import FiniteFunction
from topocheck.setcore import MAX_CARRIER, Carrier, PointSet, mask_of, members, parse_point_set
from topocheck.topology import Topology, validate


# ============ Pydantic Records ============

def _carrier_size(v: int) -> int:
    if not 0 <= v <= MAX_CARRIER:
        raise ValueError(f"carrier size must lie in 0..{MAX_CARRIER}")
    return v


class TopologyFile(BaseModel):
    """Topology record: carrier size and open sets as element lists."""
    n: int
    opens: List[List[int]]

    @field_validator("n")
    @classmethod
    def check_n(cls, v: int) -> int:
        return _carrier_size(v)


class OperatorFile(BaseModel):
    """Closure operator record: one element list per input mask."""
    n: int
    table: List[List[int]]

    @field_validator("n")
    @classmethod
    def check_n(cls, v: int) -> int:
        return _carrier_size(v)


class FunctionFile(BaseModel):
    """Function record: domain size, codomain size and the lookup table."""
    dom_n: int
    cod_n: int
    table: List[int]

    @field_validator("dom_n", "cod_n")
    @classmethod
    def check_sizes(cls, v: int) -> int:
        return _carrier_size(v)


def _location(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = ".".join(str(p) for p in first.get("loc", ()))
    return loc or "document"


def _parse(model, text: str, what: str):
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        raise FormatError(f"malformed {what} file: {first['msg']}", _location(e)) from None


def _mask_from_list(points: List[int], carrier: Carrier, where: str) -> int:
    for p in points:
        if not 0 <= p < carrier.size:
            raise FormatError(f"point {p} is outside a carrier of size {carrier.size}", where)
    return mask_of(points)


# ============ TOPOLOGY ============

def parse_topology_file(text: str) -> TopologyFile:
    return _parse(TopologyFile, text, "topology")


def family_from_record(record: TopologyFile) -> Tuple[Carrier, List[PointSet]]:
    """The raw family of a record; the axioms are not checked here."""
    carrier = Carrier(record.n)
    family = [
        PointSet(carrier, _mask_from_list(points, carrier, f"opens.{i}"))
        for i, points in enumerate(record.opens)
    ]
    return carrier, family


def topology_from_record(record: TopologyFile) -> Topology:
    """
    A validated topology.

    Raises:
        FormatError: the family is not a topology.
    """
    carrier, family = family_from_record(record)
    t, report = validate(carrier, family)
    if report:
        raise FormatError(f"not a topology: {'; '.join(report.lines())}", "opens")
    return t


def topology_to_record(t: Topology) -> TopologyFile:
    return TopologyFile(n=t.n, opens=[list(members(m)) for m in t.opens])


def emit_topology(t: Topology) -> str:
    return topology_to_record(t).model_dump_json()


def load_topology(text: str) -> Topology:
    return topology_from_record(parse_topology_file(text))


# ============ OPERATOR ============

def parse_operator_file(text: str) -> OperatorFile:
    return _parse(OperatorFile, text, "operator")


def table_from_record(record: OperatorFile) -> Tuple[Carrier, List[int]]:
    """Raw table masks; length is checked by validate_kuratowski."""
    carrier = Carrier(record.n)
    table = [
        _mask_from_list(points, carrier, f"table.{i}")
        for i, points in enumerate(record.table)
    ]
    return carrier, table


def operator_to_record(op: ClosureOperator) -> OperatorFile:
    return OperatorFile(n=op.n, table=[list(members(int(m))) for m in op.table])


def emit_operator(op: ClosureOperator) -> str:
    return operator_to_record(op).model_dump_json()


# ============ FUNCTION ============

def parse_function_file(text: str) -> FunctionFile:
    return _parse(FunctionFile, text, "function")


def function_from_record(record: FunctionFile) -> FiniteFunction:
    try:
        return FiniteFunction(Carrier(record.dom_n), Carrier(record.cod_n), record.table)
    except (CarrierError, PartialTableError) as e:
        raise FormatError(str(e), "table") from None


def function_to_record(f: FiniteFunction) -> FunctionFile:
    return FunctionFile(dom_n=f.dom.size, cod_n=f.cod.size, table=list(f.table))


def emit_function(f: FiniteFunction) -> str:
    return function_to_record(f).model_dump_json()


def load_function(text: str) -> FiniteFunction:
    return function_from_record(parse_function_file(text))


# ============ SUBSETS & DIGESTS ============

def parse_subset_spec(text: str, carrier: Carrier) -> PointSet:
    """Command-line subset: "{1,2}" or a bitstring of carrier.size digits."""
    try:
        return parse_point_set(text, carrier)
    except TopocheckError as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(str(e), "subset") from None


def digest(data: Union[str, bytes]) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def decode_text(data: bytes, what: str = "file") -> str:
    """UTF-8 text of a raw input file; undecodable bytes are a FormatError."""
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"not UTF-8 text: byte 0x{data[e.start]:02x} at offset {e.start}", what) from None

"""
Verification Engine - Cross-Check Orchestration
Runs every construction of a property, collects ordered check lines and
derives the verdict from them. Sweeps run the checks over the census and
summarize one row per carrier size.
"""

import time
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, model_validator

from topocheck.census import get_census, random_topology
from topocheck.closure import (
    closure_from_topology,
    is_monotone,
    kuratowski_accepts,
    topology_from_closure,
    validate_kuratowski,
)
from topocheck.config import get_settings, log
from topocheck.errors import ConstructionError, PreconditionError
from topocheck.formats import emit_topology, load_topology
from topocheck.initial import (
    FiniteFunction,
    corestriction,
    image_set,
    inclusion,
    initial_topology_direct,
    initial_topology_via_closure,
    initial_topology_via_image,
    is_continuous_via_image,
    verify_weakest,
    verify_weakest_by_census,
)
from topocheck.setcore import Carrier, PointSet, format_mask
from topocheck.subspace import (
    maximal_open_representative,
    open_representatives,
    subspace_topology,
    subspace_topology_canonical,
    subspace_via_closure,
)
from topocheck.topology import Topology, closure_table, is_continuous, validate_masks

# Monotonicity builds a 4^n grid
_MONOTONE_MAX_N = 10


# ============ CHECK LINES & REPORTS ============

class CheckLine(BaseModel):
    name: str
    passed: bool
    detail: str = ""

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}" if self.detail else f"{status} {self.name}"


class RunReport(BaseModel):
    """Outcome of one CLI command. exit_code: 0 pass, 1 verification failure, 2 bad input."""
    command: str
    inputs: Dict[str, str] = {}
    verdict: Literal["pass", "fail"]
    details: List[str] = []
    exit_code: Literal[0, 1, 2]

    @model_validator(mode="after")
    def verdict_matches_exit_code(self) -> "RunReport":
        if (self.verdict == "pass") != (self.exit_code == 0):
            raise ValueError(f"verdict {self.verdict!r} contradicts exit code {self.exit_code}")
        return self

    @classmethod
    def from_checks(cls, command: str, inputs: Dict[str, str], checks: Sequence[CheckLine], extra: Sequence[str] = ()) -> "RunReport":
        passed = all(c.passed for c in checks)
        return cls(
            command=command,
            inputs=inputs,
            verdict="pass" if passed else "fail",
            details=[c.render() for c in checks] + list(extra),
            exit_code=0 if passed else 1,
        )

    @classmethod
    def input_error(cls, command: str, inputs: Dict[str, str], message: str) -> "RunReport":
        return cls(command=command, inputs=inputs, verdict="fail", details=[f"input error: {message}"], exit_code=2)

    def render(self) -> str:
        lines = [f"command: {self.command}"]
        lines += [f"input {name} sha256:{value}" for name, value in sorted(self.inputs.items())]
        lines += self.details
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _attempt(name: str, build):
    """Run a construction; a ConstructionError becomes a failing line."""
    try:
        return build(), None
    except ConstructionError as e:
        return None, CheckLine(name=name, passed=False, detail=str(e))


def _opens_text(t: Topology) -> str:
    return "[" + ",".join(format_mask(m) for m in t.opens) + "]"


# ============ SUBSPACE ============

def check_representatives(t: Topology, y: PointSet, relative: Sequence[int]) -> CheckLine:
    """Maximality of U* for every relatively open V (parent labels)."""
    for v_mask in relative:
        v = PointSet(t.carrier, int(v_mask))
        u = maximal_open_representative(t, y, v)
        others = open_representatives(t, y, v)
        if not t.is_open(u) or (u.mask & y.mask) != v.mask or any(w.mask & ~u.mask for w in others):
            return CheckLine(name="representative maximality", passed=False, detail=f"V={v}, U*={u}")
    return CheckLine(name="representative maximality", passed=True, detail=f"{len(relative)} relatively open sets")


def check_subspace(t: Topology, y: PointSet) -> Tuple[List[CheckLine], List[str]]:
    """
    Three-way agreement of the relative topology on Y, the canonical
    certificate, and representative maximality.

    Returns:
        (check lines, certificate lines)
    """
    lines: List[CheckLine] = []
    direct = subspace_topology(t, y)
    canonical, failed = _attempt("canonical construction", lambda: subspace_topology_canonical(t, y))
    if failed:
        lines.append(failed)
    via_closure, failed = _attempt("closure construction", lambda: subspace_via_closure(t, y))
    if failed:
        lines.append(failed)

    if canonical is not None and via_closure is not None:
        agree = direct.sub == canonical.sub == via_closure.sub
        lines.append(CheckLine(name="subspace agreement", passed=agree, detail=_opens_text(direct.sub)))

        # closed sets of the closure route = complements in Y of the traces
        full = via_closure.sub.carrier.full_mask
        expected = tuple(sorted(full ^ m for m in direct.sub.opens))
        lines.append(CheckLine(
            name="relative closed sets",
            passed=via_closure.sub.closed_masks == expected,
            detail=f"{len(expected)} closed sets",
        ))

    certificate_lines: List[str] = []
    if canonical is not None:
        certificate_lines = canonical.certificate.lines()
        lines.append(CheckLine(
            name="certificate",
            passed=canonical.certificate.holds,
            detail=f"{len(certificate_lines)} identities",
        ))

    relative = sorted(direct.lift(m) for m in direct.sub.opens)
    lines.append(check_representatives(t, y, relative))
    return lines, certificate_lines


def check_inclusion(view) -> CheckLine:
    """The initial topology of a subspace embedding is the subspace topology."""
    pulled = initial_topology_direct(view.parent, inclusion(view))
    return CheckLine(name="inclusion coincidence", passed=pulled == view.sub, detail=f"Y={view.ymask}")


# ============ INITIAL ============

def check_initial(tX: Topology, f: FiniteFunction, census: Optional[Sequence[Topology]] = None) -> Tuple[List[CheckLine], Optional[Topology]]:
    """
    Three-way agreement of the initial topology, continuity, minimality and
    the injective/surjective specialisations.

    Returns:
        (check lines, the direct initial topology)
    """
    lines: List[CheckLine] = []
    direct = initial_topology_direct(tX, f)
    via_image, failed = _attempt("image construction", lambda: initial_topology_via_image(tX, f))
    if failed:
        lines.append(failed)
    via_closure, failed = _attempt("closure construction", lambda: initial_topology_via_closure(tX, f))
    if failed:
        lines.append(failed)

    if via_image is not None and via_closure is not None:
        agree = direct == via_image == via_closure
        lines.append(CheckLine(name="initial agreement", passed=agree, detail=_opens_text(direct)))

    lines.append(CheckLine(name="continuity", passed=is_continuous(f, direct, tX)))
    verdict = verify_weakest(tX, f, direct)
    lines.append(CheckLine(name="weakest", passed=verdict.holds, detail=verdict.describe()))

    if census is not None:
        oracle = verify_weakest_by_census(tX, f, direct, census)
        lines.append(CheckLine(name="weakest (census)", passed=oracle.holds, detail=f"{len(census)} topologies"))
        same = all(is_continuous(f, s, tX) == is_continuous_via_image(f, s, tX) for s in census)
        lines.append(CheckLine(name="corestriction continuity", passed=same))

    if f.is_surjective:
        g, view = corestriction(tX, f)
        lines.append(CheckLine(
            name="surjective shortcut",
            passed=view.sub == tX and initial_topology_direct(view.sub, g) == direct,
        ))

    if f.is_injective:
        # f carries the initial opens onto the traces on f(Y)
        z = image_set(f).mask
        traces = np.unique(tX.opens_array & z)
        images = np.unique(f.image_masks(direct.opens_array))
        lines.append(CheckLine(name="injective coincidence", passed=np.array_equal(traces, images)))

    return lines, direct


# ============ CLOSURE ============

def check_closure_roundtrip(t: Topology) -> List[CheckLine]:
    op = closure_from_topology(t)
    back = topology_from_closure(op)
    lines = [
        CheckLine(name="round trip A", passed=back == t),
        CheckLine(name="round trip B", passed=closure_from_topology(back) == op),
    ]
    if t.n <= _MONOTONE_MAX_N:
        lines.append(CheckLine(name="monotonicity", passed=is_monotone(op)))
    return lines


def _induced_table(n: int, table: np.ndarray) -> bool:
    """Complements of the fixed points form a topology whose closure is the table."""
    every = np.arange(1 << n, dtype=np.int64)
    t, report = validate_masks(n, ((1 << n) - 1) ^ every[table == every])
    return report is None and np.array_equal(closure_table(t, every), table)


def classify_all_tables(n: int, batch_size: int = 1 << 20) -> List[CheckLine]:
    """
    Classify every raw table on n points. The accepted tables must be
    exactly the closure operators of the census topologies.
    """
    size = 1 << n
    total = size ** size
    realized = {tuple(int(v) for v in closure_from_topology(t).table) for t in get_census(n)}

    accepted = set()
    for start in range(0, total, batch_size):
        codes = np.arange(start, min(start + batch_size, total), dtype=np.int64)
        tables = np.stack([(codes >> (n * i)) & (size - 1) for i in range(size)], axis=1)
        for row in tables[kuratowski_accepts(tables)]:
            accepted.add(tuple(int(v) for v in row))

    lines = [CheckLine(
        name=f"table classification n={n}",
        passed=accepted == realized,
        detail=f"{total} tables, {len(accepted)} accepted, {len(realized)} realized",
    )]

    if total <= 1 << 12:
        carrier = Carrier(n)
        agree = True
        for code in range(total):
            table = np.array([(code >> (n * i)) & (size - 1) for i in range(size)], dtype=np.int64)
            op, _ = validate_kuratowski(carrier, table)
            if (op is not None) != _induced_table(n, table) or (op is not None) != (tuple(table) in realized):
                agree = False
                break
        lines.append(CheckLine(name=f"validator soundness n={n}", passed=agree, detail=f"{total} tables"))
    return lines


# ============ SWEEPS ============

def _summary(rows: List[dict]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=["check", "n", "cases", "failures"])
    return frame.groupby(["check", "n"], as_index=False, sort=True)[["cases", "failures"]].sum()


def _tally(rows: List[dict], check: str, n: int, lines: Sequence[CheckLine], failures: List[str]) -> None:
    bad = [c for c in lines if not c.passed]
    rows.append({"check": check, "n": n, "cases": 1, "failures": int(bool(bad))})
    if bad and len(failures) < 20:
        failures.extend(c.render() for c in bad)


def sweep_subspace(max_n: int) -> Tuple[pd.DataFrame, List[str]]:
    """Every census topology, every Y: agreement, maximality, inclusion coincidence."""
    rows, failures = [], []
    for n in range(max_n + 1):
        carrier = Carrier(n)
        for t in get_census(n):
            for ymask in range(carrier.subset_count):
                y = PointSet(carrier, ymask)
                lines, _ = check_subspace(t, y)
                _tally(rows, "subspace", n, lines, failures)
                _tally(rows, "inclusion", n, [check_inclusion(subspace_topology(t, y))], failures)
    log("SWEEP", f"subspace sweep to n={max_n}: {len(rows)} cases")
    return _summary(rows), failures


def _all_functions(dom: int, cod: int):
    if cod == 0:
        if dom == 0:
            yield ()
        return
    for code in range(cod ** dom):
        table = []
        for _ in range(dom):
            code, digit = divmod(code, cod)
            table.append(digit)
        yield tuple(table)


def sweep_initial(max_n: int) -> Tuple[pd.DataFrame, List[str]]:
    """Every census topology on the codomain, every function from a domain of size <= max_n."""
    rows, failures = [], []
    for cod in range(max_n + 1):
        for tX in get_census(cod):
            for dom in range(max_n + 1):
                census = get_census(dom).topologies
                for table in _all_functions(dom, cod):
                    f = FiniteFunction(Carrier(dom), Carrier(cod), table)
                    lines, _ = check_initial(tX, f, census)
                    _tally(rows, "initial", cod, lines, failures)
    log("SWEEP", f"initial sweep to n={max_n}: {len(rows)} cases")
    return _summary(rows), failures


def sweep_closure(max_n: int) -> Tuple[pd.DataFrame, List[str]]:
    """Round trips A and B over the census."""
    rows, failures = [], []
    for n in range(max_n + 1):
        for t in get_census(n):
            _tally(rows, "closure", n, check_closure_roundtrip(t), failures)
    return _summary(rows), failures


def sweep_formats(max_n: int) -> List[CheckLine]:
    """Every census entry re-parses from its emitted record to an equal value."""
    lines = []
    for n in range(max_n + 1):
        census = get_census(n)
        same = all(load_topology(emit_topology(t)) == t for t in census)
        lines.append(CheckLine(name=f"format round trip n={n}", passed=same, detail=f"{census.count} topologies"))
    return lines


def fuzz(cases: int, min_n: int, max_n: int, seed: int) -> Tuple[pd.DataFrame, List[str]]:
    """
    Random topologies at n in [min_n, max_n], each with a random Y and a
    random function into it; subspace, representative and initial checks
    (the preimage argument stands in for the census oracle).
    """
    limit = get_settings().MAX_CARRIER
    if cases < 0 or min_n < 0 or min_n > max_n or max_n > limit:
        raise PreconditionError(
            f"fuzz needs cases >= 0 and 0 <= min_n <= max_n <= {limit}, got cases={cases} min_n={min_n} max_n={max_n}"
        )
    rng = np.random.default_rng(seed)
    rows, failures = [], []
    started = time.perf_counter()
    for _ in range(cases):
        n = int(rng.integers(min_n, max_n + 1))
        t = random_topology(n, seed=int(rng.integers(0, 2**32)))
        carrier = t.carrier
        y = PointSet(carrier, int(rng.integers(0, carrier.subset_count)))
        lines, _ = check_subspace(t, y)
        _tally(rows, "subspace", n, lines, failures)

        dom = int(rng.integers(0, n + 1)) if n else 0
        f = FiniteFunction(Carrier(dom), carrier, [int(v) for v in rng.integers(0, max(n, 1), size=dom)])
        lines, _ = check_initial(t, f)
        _tally(rows, "initial", n, lines, failures)
    log("FUZZ", f"{cases} cases in {time.perf_counter() - started:.2f}s")
    return _summary(rows), failures


def sweep_lines(frame: pd.DataFrame, failures: List[str]) -> Tuple[List[CheckLine], List[str]]:
    """One check line per sweep row plus the rendered table."""
    checks = [
        CheckLine(
            name=f"{row.check} n={row.n}",
            passed=bool(row.failures == 0),
            detail=f"{int(row.cases)} cases, {int(row.failures)} failures",
        )
        for row in frame.itertuples(index=False)
    ]
    return checks, frame.to_string(index=False).splitlines() + failures


def default_max_n() -> int:
    return get_settings().SWEEP_MAX_N
